#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vocab::text {

/// Decodes one UTF-8 code point starting at `pos` and advances `pos`.
/// Invalid sequences decode to the single byte value and advance by one.
char32_t next_code_point(std::string_view s, std::size_t& pos) noexcept;
void append_utf8(std::string& out, char32_t cp);
bool is_valid_utf8(std::string_view s) noexcept;

/// Simple lowercase mapping covering ASCII, Latin-1, Latin Extended-A,
/// basic Greek and Cyrillic.
char32_t fold_case(char32_t cp) noexcept;
std::string fold_case(std::string_view s);

bool is_space(char32_t cp) noexcept;

/// Trims and collapses whitespace runs to a single ASCII space.
std::string collapse_whitespace(std::string_view s);

/// Label normalization used for every label comparison: case-fold, trim,
/// collapse internal whitespace, strip terminal '.', ',', ';', ':'.
std::string normalize_label(std::string_view s);

/// "Chemistry, Organic" -> "organic chemistry" (normalized). Returns an
/// empty string when the label does not have the "A, B" shape.
std::string uninvert_label(std::string_view label);

}  // namespace vocab::text
