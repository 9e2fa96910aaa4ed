#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vocab/ark.hpp"
#include "vocab/error.hpp"

namespace vocab {

using ark::ArkId;

enum class LabelKind { Pref, Alt };
std::string_view to_string(LabelKind kind);

struct SourceRef {
  std::optional<int> page;
  std::optional<std::string> entryId;

  bool empty() const { return !page && !entryId; }
  bool operator==(const SourceRef&) const = default;
};

struct Concept {
  ArkId id;
  std::string prefLabel;
  std::set<std::string> altLabels;
  std::set<ArkId> broader;
  std::set<ArkId> narrower;
  std::set<ArkId> related;
  std::string schemeId;
  std::optional<SourceRef> source;

  bool operator==(const Concept&) const = default;
};

enum class DiagnosticCode {
  DuplicatePref,
  PrefAltConflict,
  DanglingRef,
  SelfReference,
  EmptyLabel,
  // Not covered by the five codes above; used by the TEI and SKOS readers.
  UnknownElement,
  InverseCompleted,
  MultiplePref,
  MissingPrefLabel,
  DuplicateId,
  IgnoredRef,
};
enum class Severity { Warning, Error };

struct Diagnostic {
  DiagnosticCode code;
  Severity severity;
  std::optional<std::string> entryId;
  std::string message;
};

std::string_view to_string(DiagnosticCode code);
std::string_view to_string(Severity severity);
/// "error DUPLICATE_PREF [entry e12]: message"
std::string format(const Diagnostic& d);
bool has_errors(std::span<const Diagnostic> diagnostics);

struct LabelHit {
  ArkId id;
  LabelKind kind;
  bool operator==(const LabelHit&) const = default;
};

struct SchemeInfo {
  std::string schemeId;
  std::string title;
  int editionYear = 0;
  std::string naan;
  bool operator==(const SchemeInfo&) const = default;
};

/// Immutable concept graph for one vocabulary edition. Built only through
/// SchemeBuilder, which enforces the label and link invariants.
class ConceptScheme {
 public:
  const SchemeInfo& info() const { return info_; }
  const std::string& id() const { return info_.schemeId; }
  const std::map<ArkId, Concept>& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }

  /// Hits for an already-normalized label; empty when absent.
  std::span<const LabelHit> label_hits(const std::string& normalized) const;
  /// Hits for labels of the form "A, B" keyed by their uninverted form "b a".
  std::span<const LabelHit> uninverted_hits(const std::string& normalized) const;
  const std::unordered_map<std::string, std::vector<LabelHit>>& label_index() const {
    return labelIndex_;
  }

  /// Structural equality: metadata and concepts. Indexes are derived.
  bool operator==(const ConceptScheme& other) const {
    return info_ == other.info_ && concepts_ == other.concepts_;
  }

 private:
  friend class SchemeBuilder;

  SchemeInfo info_;
  std::map<ArkId, Concept> concepts_;
  std::unordered_map<std::string, std::vector<LabelHit>> labelIndex_;
  std::unordered_map<std::string, std::vector<LabelHit>> uninvertedIndex_;
};

struct BuildOptions {
  /// Emit INVERSE_COMPLETED when a missing inverse link has to be added.
  bool warnOnInverseCompletion = false;
};

class SchemeBuilder {
 public:
  explicit SchemeBuilder(SchemeInfo info) : info_(std::move(info)) {}

  /// Adds a concept. A concept whose normalized prefLabel is already taken
  /// is rejected with DUPLICATE_PREF; a repeated id with DUPLICATE_ID.
  bool add(Concept node, std::vector<Diagnostic>& diagnostics);

  /// Finds a pending concept by id (for incremental linking).
  Concept* find(const ArkId& id);
  /// Finds a pending concept by normalized prefLabel.
  Concept* find_pref(const std::string& normalized);

  /// Removes self-links and dangling links, completes inverse links and
  /// builds the label indexes. The builder is left empty.
  ConceptScheme build(std::vector<Diagnostic>& diagnostics, BuildOptions options = {});

 private:
  SchemeInfo info_;
  std::map<ArkId, Concept> concepts_;
  std::unordered_map<std::string, ArkId> prefs_;
};

/// Full-scan check of the scheme invariants; returns one message per violation.
std::vector<std::string> check_invariants(const ConceptScheme& scheme);

/// Lookup by id after normalization. Qualifier and inflection are ignored.
const Concept* get_concept(const ConceptScheme& scheme, const ArkId& id);

class AmbiguousLabel : public Error {
 public:
  AmbiguousLabel(const std::string& label, std::vector<ArkId> candidates);
  const std::vector<ArkId>& candidates() const { return candidates_; }

 private:
  std::vector<ArkId> candidates_;
};

struct LabelMatch {
  const Concept* node;
  LabelKind kind;
};

/// Returns the authorized concept for a label. A prefLabel match wins over
/// altLabel matches. Throws AmbiguousLabel when the label is only an
/// altLabel and belongs to two or more concepts.
std::optional<LabelMatch> find_by_label(const ConceptScheme& scheme, std::string_view label);

enum class Relation { Broader, Narrower, Related };
std::string_view to_string(Relation relation);
std::optional<Relation> parse_relation(std::string_view name);
const std::set<ArkId>& links(const Concept& node, Relation relation);

/// Breadth-first closure along one relation up to `depth` levels, excluding
/// the start concept. Ordered by level, then by ARK name within a level.
/// Throws UnknownConcept.
std::vector<ArkId> traverse(const ConceptScheme& scheme, const ArkId& start, Relation relation,
                            int depth);

}  // namespace vocab
