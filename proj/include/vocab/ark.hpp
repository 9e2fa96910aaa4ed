#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocab/error.hpp"

namespace vocab::ark {

/// Betanumeric alphabet used for minted names and check characters.
/// Radix 29: digits plus consonants, without 'l'.
inline constexpr std::string_view kAlphabet = "0123456789bcdfghjkmnpqrstvwxz";
inline constexpr int kRadix = 29;

/// Position of `c` in the alphabet; characters outside it have ordinal 0.
int ordinal(char c) noexcept;
bool in_alphabet(char c) noexcept;

enum class Inflection { None, Brief, Full };

/// A parsed ARK. `qualifier` keeps everything after the name verbatim,
/// including its leading '/' or '.'.
struct ArkId {
  std::string naan;
  std::string name;
  std::string qualifier;
  Inflection inflection = Inflection::None;

  /// "ark:/NAAN/NAME" followed by the qualifier and inflection marks.
  std::string to_string() const;
  /// The identifier without qualifier or inflection.
  ArkId base() const;

  auto operator<=>(const ArkId&) const = default;
  bool operator==(const ArkId&) const = default;
};

/// Accepts "ark:/NAAN/NAME", "ark:NAAN/NAME" and "http(s)://host/ark:/NAAN/NAME".
/// Throws InvalidArk.
ArkId parse(std::string_view text);

/// Lowercases naan and name and removes hyphens from the name. Idempotent.
ArkId normalize(const ArkId& id);

/// Parse followed by normalize.
ArkId parse_normalized(std::string_view text);

/// NOID check character over naan + "/" + body.
char check_char(std::string_view naan, std::string_view body);

enum class ValidationMode { Lax, Strict };

struct Validation {
  bool ok = true;
  std::vector<std::string> reasons;
};

/// Lax checks grammar only; strict also verifies the trailing check char.
Validation validate(const ArkId& id, ValidationMode mode);

struct MinterState {
  std::string naan = "99152";
  std::string prefix = "b4";
  int bladeLength = 6;
  std::uint64_t counter = 0;

  static constexpr std::uint64_t kMultiplier = 1537771;
  static constexpr std::uint64_t kOffset = 12345;

  std::uint64_t capacity() const;
  bool operator==(const MinterState&) const = default;
};

/// Mints the id for the current counter and returns it with the advanced
/// state. Throws MinterExhausted when counter == capacity.
std::pair<ArkId, MinterState> mint(const MinterState& state);

/// Reads a minter state file ({naan, prefix, bladeLength, counter}).
MinterState load_minter_state(const std::filesystem::path& path);

/// Writes the state file atomically: temp file, fsync, rename.
void save_minter_state(const std::filesystem::path& path, const MinterState& state);

}  // namespace vocab::ark
