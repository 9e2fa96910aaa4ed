#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocab/ark.hpp"
#include "vocab/model.hpp"
#include "vocab/xml.hpp"

namespace vocab::tei {

enum class RefKind { See, SeeAlso, SeeFrom, SeeAlsoFrom };
std::string_view to_string(RefKind kind);
std::optional<RefKind> parse_ref_kind(std::string_view type);

struct CrossRef {
  RefKind kind;
  std::string target;
  bool operator==(const CrossRef&) const = default;
};

/// One printed vocabulary entry: a headword and its cross-references.
struct VocabEntry {
  std::string entryId;
  std::string headword;
  std::vector<CrossRef> refs;
  std::optional<int> page;
  bool operator==(const VocabEntry&) const = default;
};

struct ParseResult {
  std::vector<VocabEntry> entries;
  std::vector<Diagnostic> diagnostics;
};

/// Reads the TEI subset: <entry xml:id> with <form><term>, repeatable
/// <xr type="..."><term>, and <pb n="..."/> page breaks. Element names are
/// matched without regard to namespace. Throws xml::MalformedXml.
ParseResult parse_tei(std::string_view document);

/// How printed "sa" / "xx" references become SKOS links.
enum class HierarchyMode { Related, Hierarchical };
std::optional<HierarchyMode> parse_hierarchy_mode(std::string_view name);

struct CompileOptions {
  std::string schemeId = "lcsh1910";
  std::string title = "Library of Congress Subject Headings, 1910";
  int editionYear = 1910;
  std::string naan = "99152";
  HierarchyMode hierarchy = HierarchyMode::Related;
  /// Shoulder and blade length of the minter assigning concept ids.
  std::string prefix = "b4";
  int bladeLength = 6;
};

struct CompileResult {
  ConceptScheme scheme;
  std::vector<Diagnostic> diagnostics;
};

/// Turns entries into a concept scheme. Pass one mints an id for every
/// authorized heading in entry order, then for every unmatched reference
/// target (stubs). Pass two applies the see / seeFrom / seeAlso /
/// seeAlsoFrom rules.
CompileResult compile_scheme(const std::vector<VocabEntry>& entries,
                             const CompileOptions& options = {});

}  // namespace vocab::tei
