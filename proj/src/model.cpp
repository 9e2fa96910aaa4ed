#include "vocab/model.hpp"

#include <algorithm>
#include <deque>

#include "vocab/text.hpp"

namespace vocab {

std::string_view to_string(LabelKind kind) { return kind == LabelKind::Pref ? "pref" : "alt"; }

std::string_view to_string(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::DuplicatePref: return "DUPLICATE_PREF";
    case DiagnosticCode::PrefAltConflict: return "PREF_ALT_CONFLICT";
    case DiagnosticCode::DanglingRef: return "DANGLING_REF";
    case DiagnosticCode::SelfReference: return "SELF_REFERENCE";
    case DiagnosticCode::EmptyLabel: return "EMPTY_LABEL";
    case DiagnosticCode::UnknownElement: return "UNKNOWN_ELEMENT";
    case DiagnosticCode::InverseCompleted: return "INVERSE_COMPLETED";
    case DiagnosticCode::MultiplePref: return "MULTIPLE_PREF";
    case DiagnosticCode::MissingPrefLabel: return "MISSING_PREF_LABEL";
    case DiagnosticCode::DuplicateId: return "DUPLICATE_ID";
    case DiagnosticCode::IgnoredRef: return "IGNORED_REF";
  }
  return "UNKNOWN";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

std::string format(const Diagnostic& d) {
  std::string out(to_string(d.severity));
  out += ' ';
  out += to_string(d.code);
  if (d.entryId) out += " [entry " + *d.entryId + "]";
  out += ": ";
  out += d.message;
  return out;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

std::optional<std::string> entry_of(const Concept& c) {
  if (c.source && c.source->entryId) return c.source->entryId;
  return std::nullopt;
}

void warn(std::vector<Diagnostic>& out, DiagnosticCode code, const Concept& c, std::string msg) {
  out.push_back({code, Severity::Warning, entry_of(c), std::move(msg)});
}

std::set<ArkId> normalized_set(const std::set<ArkId>& ids) {
  std::set<ArkId> out;
  for (const auto& id : ids) out.insert(ark::normalize(id).base());
  return out;
}

void push_hit(std::vector<LabelHit>& hits, LabelHit hit) {
  if (std::find(hits.begin(), hits.end(), hit) == hits.end()) hits.push_back(std::move(hit));
}

}  // namespace

std::span<const LabelHit> ConceptScheme::label_hits(const std::string& normalized) const {
  auto it = labelIndex_.find(normalized);
  if (it == labelIndex_.end()) return {};
  return it->second;
}

std::span<const LabelHit> ConceptScheme::uninverted_hits(const std::string& normalized) const {
  auto it = uninvertedIndex_.find(normalized);
  if (it == uninvertedIndex_.end()) return {};
  return it->second;
}

bool SchemeBuilder::add(Concept node, std::vector<Diagnostic>& diagnostics) {
  node.id = ark::normalize(node.id).base();
  node.prefLabel = text::collapse_whitespace(node.prefLabel);
  node.schemeId = info_.schemeId;
  node.broader = normalized_set(node.broader);
  node.narrower = normalized_set(node.narrower);
  node.related = normalized_set(node.related);
  if (node.source && node.source->empty()) node.source.reset();

  const std::string key = text::normalize_label(node.prefLabel);
  if (key.empty()) {
    diagnostics.push_back({DiagnosticCode::EmptyLabel, Severity::Error, entry_of(node),
                           "concept " + node.id.to_string() + " has an empty prefLabel"});
    return false;
  }
  if (auto it = prefs_.find(key); it != prefs_.end()) {
    diagnostics.push_back({DiagnosticCode::DuplicatePref, Severity::Error, entry_of(node),
                           "duplicate authorized heading '" + node.prefLabel +
                               "' (already held by " + it->second.to_string() + ")"});
    return false;
  }
  if (concepts_.count(node.id) != 0) {
    diagnostics.push_back({DiagnosticCode::DuplicateId, Severity::Error, entry_of(node),
                           "duplicate concept id " + node.id.to_string()});
    return false;
  }
  prefs_.emplace(key, node.id);
  ArkId id = node.id;
  concepts_.emplace(std::move(id), std::move(node));
  return true;
}

Concept* SchemeBuilder::find(const ArkId& id) {
  auto it = concepts_.find(ark::normalize(id).base());
  return it == concepts_.end() ? nullptr : &it->second;
}

Concept* SchemeBuilder::find_pref(const std::string& normalized) {
  auto it = prefs_.find(normalized);
  return it == prefs_.end() ? nullptr : find(it->second);
}

ConceptScheme SchemeBuilder::build(std::vector<Diagnostic>& diagnostics, BuildOptions options) {
  // Per-concept cleanup: self-links, dangling links, unusable altLabels.
  for (auto& [id, c] : concepts_) {
    for (auto* rel : {&c.broader, &c.narrower, &c.related}) {
      if (rel->erase(id) != 0) {
        warn(diagnostics, DiagnosticCode::SelfReference, c,
             "'" + c.prefLabel + "' links to itself; link removed");
      }
      for (auto it = rel->begin(); it != rel->end();) {
        if (concepts_.count(*it) == 0) {
          warn(diagnostics, DiagnosticCode::DanglingRef, c,
               "'" + c.prefLabel + "' links to unknown " + it->to_string() + "; link removed");
          it = rel->erase(it);
        } else {
          ++it;
        }
      }
    }
    const std::string pref = text::normalize_label(c.prefLabel);
    std::set<std::string> alts;
    for (const auto& alt : c.altLabels) {
      const std::string norm = text::normalize_label(alt);
      if (norm.empty()) {
        warn(diagnostics, DiagnosticCode::EmptyLabel, c,
             "empty altLabel on '" + c.prefLabel + "' dropped");
      } else if (norm == pref) {
        warn(diagnostics, DiagnosticCode::PrefAltConflict, c,
             "altLabel '" + alt + "' equals the prefLabel of its own concept; dropped");
      } else {
        alts.insert(text::collapse_whitespace(alt));
      }
    }
    c.altLabels = std::move(alts);
  }

  // Inverse completion.
  for (auto& [id, c] : concepts_) {
    auto complete = [&](const std::set<ArkId>& targets, std::set<ArkId> Concept::*inverse,
                        std::string_view name) {
      for (const auto& target : targets) {
        Concept& other = concepts_.at(target);
        if ((other.*inverse).insert(id).second && options.warnOnInverseCompletion) {
          warn(diagnostics, DiagnosticCode::InverseCompleted, other,
               "added missing " + std::string(name) + " link from '" + other.prefLabel +
                   "' to '" + c.prefLabel + "'");
        }
      }
    };
    complete(c.broader, &Concept::narrower, "narrower");
    complete(c.narrower, &Concept::broader, "broader");
    complete(c.related, &Concept::related, "related");
  }

  ConceptScheme scheme;
  scheme.info_ = info_;
  for (const auto& [id, c] : concepts_) {
    push_hit(scheme.labelIndex_[text::normalize_label(c.prefLabel)], {id, LabelKind::Pref});
  }
  for (const auto& [id, c] : concepts_) {
    for (const auto& alt : c.altLabels) {
      const std::string norm = text::normalize_label(alt);
      auto& hits = scheme.labelIndex_[norm];
      if (!hits.empty() && hits.front().kind == LabelKind::Pref && hits.front().id != id) {
        warn(diagnostics, DiagnosticCode::PrefAltConflict, c,
             "altLabel '" + alt + "' of '" + c.prefLabel + "' is also the prefLabel of " +
                 hits.front().id.to_string());
      }
      push_hit(hits, {id, LabelKind::Alt});
    }
  }
  for (const auto& [id, c] : concepts_) {
    if (auto inv = text::uninvert_label(c.prefLabel); !inv.empty()) {
      push_hit(scheme.uninvertedIndex_[inv], {id, LabelKind::Pref});
    }
    for (const auto& alt : c.altLabels) {
      if (auto inv = text::uninvert_label(alt); !inv.empty()) {
        push_hit(scheme.uninvertedIndex_[inv], {id, LabelKind::Alt});
      }
    }
  }
  scheme.concepts_ = std::move(concepts_);
  concepts_.clear();
  prefs_.clear();
  return scheme;
}

std::vector<std::string> check_invariants(const ConceptScheme& scheme) {
  std::vector<std::string> problems;
  std::unordered_map<std::string, ArkId> prefs;
  for (const auto& [id, c] : scheme.concepts()) {
    const std::string who = id.to_string();
    const std::string pref = text::normalize_label(c.prefLabel);
    if (pref.empty()) problems.push_back(who + ": empty prefLabel");
    if (auto [it, fresh] = prefs.emplace(pref, id); !fresh) {
      problems.push_back(who + ": prefLabel duplicates " + it->second.to_string());
    }
    if (c.altLabels.count(c.prefLabel) != 0) problems.push_back(who + ": prefLabel among altLabels");
    if (c.schemeId != scheme.id()) problems.push_back(who + ": wrong schemeId");
    for (auto rel : {Relation::Broader, Relation::Narrower, Relation::Related}) {
      for (const auto& target : links(c, rel)) {
        if (target == id) problems.push_back(who + ": self link");
        const Concept* other = get_concept(scheme, target);
        if (other == nullptr) {
          problems.push_back(who + ": dangling link to " + target.to_string());
          continue;
        }
        Relation inverse = rel == Relation::Broader    ? Relation::Narrower
                           : rel == Relation::Narrower ? Relation::Broader
                                                       : Relation::Related;
        if (links(*other, inverse).count(id) == 0) {
          problems.push_back(who + ": " + std::string(to_string(rel)) + " link to " +
                             target.to_string() + " lacks its inverse");
        }
      }
    }
    std::vector<std::string> labels(c.altLabels.begin(), c.altLabels.end());
    labels.push_back(c.prefLabel);
    for (const auto& label : labels) {
      auto hits = scheme.label_hits(text::normalize_label(label));
      if (std::none_of(hits.begin(), hits.end(), [&](const LabelHit& h) { return h.id == id; })) {
        problems.push_back(who + ": label '" + label + "' missing from index");
      }
    }
  }
  return problems;
}

const Concept* get_concept(const ConceptScheme& scheme, const ArkId& id) {
  auto it = scheme.concepts().find(ark::normalize(id).base());
  return it == scheme.concepts().end() ? nullptr : &it->second;
}

namespace {
std::string join_ids(const std::vector<ArkId>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id.to_string();
  }
  return out;
}
}  // namespace

AmbiguousLabel::AmbiguousLabel(const std::string& label, std::vector<ArkId> candidates)
    : Error("label '" + label + "' is an altLabel of several concepts: " + join_ids(candidates)),
      candidates_(std::move(candidates)) {}

std::optional<LabelMatch> find_by_label(const ConceptScheme& scheme, std::string_view label) {
  auto hits = scheme.label_hits(text::normalize_label(label));
  if (hits.empty()) return std::nullopt;
  for (const auto& hit : hits) {
    if (hit.kind == LabelKind::Pref) return LabelMatch{get_concept(scheme, hit.id), LabelKind::Pref};
  }
  std::vector<ArkId> ids;
  for (const auto& hit : hits) {
    if (std::find(ids.begin(), ids.end(), hit.id) == ids.end()) ids.push_back(hit.id);
  }
  if (ids.size() > 1) {
    std::sort(ids.begin(), ids.end());
    throw AmbiguousLabel(std::string(label), std::move(ids));
  }
  return LabelMatch{get_concept(scheme, ids.front()), LabelKind::Alt};
}

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::Broader: return "broader";
    case Relation::Narrower: return "narrower";
    case Relation::Related: return "related";
  }
  return "related";
}

std::optional<Relation> parse_relation(std::string_view name) {
  if (name == "broader") return Relation::Broader;
  if (name == "narrower") return Relation::Narrower;
  if (name == "related") return Relation::Related;
  return std::nullopt;
}

const std::set<ArkId>& links(const Concept& node, Relation relation) {
  switch (relation) {
    case Relation::Broader: return node.broader;
    case Relation::Narrower: return node.narrower;
    case Relation::Related: return node.related;
  }
  return node.related;
}

std::vector<ArkId> traverse(const ConceptScheme& scheme, const ArkId& start, Relation relation,
                            int depth) {
  if (depth < 1) throw Error("traverse depth must be at least 1");
  const Concept* origin = get_concept(scheme, start);
  if (origin == nullptr) throw UnknownConcept("unknown concept " + start.to_string());

  std::set<ArkId> visited{origin->id};
  std::vector<ArkId> result;
  std::vector<ArkId> frontier{origin->id};
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    // std::set keeps each level in ARK order.
    std::set<ArkId> next;
    for (const auto& id : frontier) {
      const Concept* c = get_concept(scheme, id);
      for (const auto& target : links(*c, relation)) {
        if (visited.insert(target).second) next.insert(target);
      }
    }
    frontier.assign(next.begin(), next.end());
    result.insert(result.end(), next.begin(), next.end());
  }
  return result;
}

}  // namespace vocab
