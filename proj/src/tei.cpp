#include "vocab/tei.hpp"

#include <charconv>

#include "vocab/text.hpp"

namespace vocab::tei {

namespace {

constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

struct WalkState {
  std::optional<int> page;
  ParseResult result;
};

std::optional<int> parse_page(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1) return std::nullopt;
  return value;
}

void on_page_break(const xml::Element& pb, WalkState& state, const std::optional<std::string>& entry) {
  const std::string* n = pb.attribute_local("n");
  if (n == nullptr) return;
  state.page = parse_page(text::collapse_whitespace(*n));
  if (!state.page) {
    state.result.diagnostics.push_back({DiagnosticCode::UnknownElement, Severity::Warning, entry,
                                        "page break n='" + *n + "' is not a positive integer"});
  }
}

void on_entry(const xml::Element& el, WalkState& state) {
  VocabEntry entry;
  const std::string* id = el.attribute(kXmlNs, "id");
  if (id == nullptr) id = el.attribute_local("id");
  if (id != nullptr) entry.entryId = *id;
  entry.page = state.page;
  std::optional<std::string> diag_id;
  if (!entry.entryId.empty()) diag_id = entry.entryId;
  auto warn = [&](DiagnosticCode code, std::string msg) {
    state.result.diagnostics.push_back({code, Severity::Warning, diag_id, std::move(msg)});
  };

  bool have_headword = false;
  for (const auto& child : el.children) {
    if (child.local == "form") {
      for (const auto& term : child.children) {
        if (term.local != "term") {
          warn(DiagnosticCode::UnknownElement, "ignored <" + term.local + "> inside <form>");
        } else if (have_headword) {
          warn(DiagnosticCode::UnknownElement, "ignored additional <term> inside <form>");
        } else {
          entry.headword = text::collapse_whitespace(term.deep_text());
          have_headword = true;
        }
      }
    } else if (child.local == "xr") {
      const std::string* type = child.attribute_local("type");
      auto kind = type ? parse_ref_kind(*type) : std::nullopt;
      if (!kind) {
        warn(DiagnosticCode::IgnoredRef,
             "ignored <xr> with type '" + (type ? *type : std::string()) + "'");
        continue;
      }
      for (const auto& term : child.children) {
        if (term.local != "term") {
          warn(DiagnosticCode::UnknownElement, "ignored <" + term.local + "> inside <xr>");
          continue;
        }
        std::string target = text::collapse_whitespace(term.deep_text());
        if (target.empty()) {
          warn(DiagnosticCode::EmptyLabel, "empty cross-reference target ignored");
        } else {
          entry.refs.push_back({*kind, std::move(target)});
        }
      }
    } else if (child.local == "pb") {
      on_page_break(child, state, diag_id);
    } else {
      warn(DiagnosticCode::UnknownElement, "ignored <" + child.local + "> inside <entry>");
    }
  }

  if (entry.headword.empty()) {
    state.result.diagnostics.push_back(
        {DiagnosticCode::EmptyLabel, Severity::Error, diag_id, "entry has a blank <term>; skipped"});
    return;
  }
  state.result.entries.push_back(std::move(entry));
}

void walk(const xml::Element& el, WalkState& state) {
  if (el.local == "entry") {
    on_entry(el, state);
    return;
  }
  if (el.local == "pb") on_page_break(el, state, std::nullopt);
  for (const auto& child : el.children) walk(child, state);
}

}  // namespace

std::string_view to_string(RefKind kind) {
  switch (kind) {
    case RefKind::See: return "see";
    case RefKind::SeeAlso: return "seeAlso";
    case RefKind::SeeFrom: return "seeFrom";
    case RefKind::SeeAlsoFrom: return "seeAlsoFrom";
  }
  return "see";
}

std::optional<RefKind> parse_ref_kind(std::string_view type) {
  if (type == "see") return RefKind::See;
  if (type == "seeAlso") return RefKind::SeeAlso;
  if (type == "seeFrom") return RefKind::SeeFrom;
  if (type == "seeAlsoFrom") return RefKind::SeeAlsoFrom;
  return std::nullopt;
}

std::optional<HierarchyMode> parse_hierarchy_mode(std::string_view name) {
  if (name == "related") return HierarchyMode::Related;
  if (name == "hierarchical") return HierarchyMode::Hierarchical;
  return std::nullopt;
}

ParseResult parse_tei(std::string_view document) {
  xml::Element root = xml::parse(document);
  WalkState state;
  walk(root, state);
  return std::move(state.result);
}

namespace {

// A see reference to the entry's own heading, or to nothing, does not make
// the heading non-authorized.
bool is_see_entry(const VocabEntry& e) {
  const std::string own = text::normalize_label(e.headword);
  for (const auto& r : e.refs) {
    if (r.kind != RefKind::See) continue;
    const std::string target = text::normalize_label(r.target);
    if (!target.empty() && target != own) return true;
  }
  return false;
}

}  // namespace

CompileResult compile_scheme(const std::vector<VocabEntry>& entries, const CompileOptions& options) {
  std::vector<Diagnostic> diags;
  SchemeBuilder builder({options.schemeId, options.title, options.editionYear, options.naan});
  ark::MinterState minter{options.naan, options.prefix, options.bladeLength, 0};
  auto next_id = [&minter] {
    auto [id, state] = ark::mint(minter);
    minter = state;
    return id;
  };
  auto entry_tag = [](const VocabEntry& e) -> std::optional<std::string> {
    if (e.entryId.empty()) return std::nullopt;
    return e.entryId;
  };

  enum class Status { Skipped, Authorized, SeeOnly };
  std::vector<Status> status(entries.size(), Status::Skipped);
  std::vector<ArkId> ids(entries.size());

  // Pass 1a: authorized headings.
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string norm = text::normalize_label(e.headword);
    if (norm.empty()) {
      diags.push_back({DiagnosticCode::EmptyLabel, Severity::Error, entry_tag(e),
                       "entry has an empty headword; skipped"});
      continue;
    }
    if (is_see_entry(e)) {
      status[i] = Status::SeeOnly;
      continue;
    }
    if (Concept* held = builder.find_pref(norm)) {
      diags.push_back({DiagnosticCode::DuplicatePref, Severity::Error, entry_tag(e),
                       "duplicate authorized heading '" + e.headword + "' (already held by " +
                           held->id.to_string() + "); entry dropped"});
      continue;
    }
    Concept c;
    c.id = next_id();
    c.prefLabel = e.headword;
    SourceRef source{e.page, entry_tag(e)};
    if (!source.empty()) c.source = source;
    ids[i] = c.id;
    if (builder.add(std::move(c), diags)) status[i] = Status::Authorized;
  }

  // Pass 1b: stubs for reference targets without an authorized entry.
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (status[i] == Status::Skipped) continue;
    for (const auto& r : entries[i].refs) {
      if (r.kind == RefKind::SeeFrom) continue;
      if (status[i] == Status::SeeOnly && r.kind != RefKind::See) continue;
      const std::string norm = text::normalize_label(r.target);
      if (norm.empty() || builder.find_pref(norm) != nullptr) continue;
      if (r.kind == RefKind::See && norm == text::normalize_label(entries[i].headword)) continue;
      Concept stub;
      stub.id = next_id();
      stub.prefLabel = r.target;
      diags.push_back({DiagnosticCode::DanglingRef, Severity::Warning, entry_tag(entries[i]),
                       "reference target '" + r.target + "' has no entry; created stub concept " +
                           stub.id.to_string()});
      builder.add(std::move(stub), diags);
    }
  }

  // Pass 2: labels and links.
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (status[i] == Status::Skipped) continue;
    const std::string own = text::normalize_label(e.headword);
    auto self_ref = [&](const CrossRef& r) {
      diags.push_back({DiagnosticCode::SelfReference, Severity::Warning, entry_tag(e),
                       "'" + e.headword + "' " + std::string(to_string(r.kind)) +
                           " reference points at itself; ignored"});
    };

    if (status[i] == Status::SeeOnly) {
      for (const auto& r : e.refs) {
        if (r.kind != RefKind::See) {
          diags.push_back({DiagnosticCode::IgnoredRef, Severity::Warning, entry_tag(e),
                           std::string(to_string(r.kind)) + " reference on non-authorized heading '" +
                               e.headword + "' ignored"});
          continue;
        }
        const std::string norm = text::normalize_label(r.target);
        if (norm == own) {
          self_ref(r);
          continue;
        }
        if (Concept* target = builder.find_pref(norm)) target->altLabels.insert(e.headword);
      }
      continue;
    }

    Concept* node = builder.find(ids[i]);
    for (const auto& r : e.refs) {
      const std::string norm = text::normalize_label(r.target);
      if (norm == own) {
        self_ref(r);
        continue;
      }
      if (r.kind == RefKind::SeeFrom) {
        node->altLabels.insert(r.target);
        continue;
      }
      Concept* target = builder.find_pref(norm);
      if (target == nullptr) continue;
      const bool hierarchical = options.hierarchy == HierarchyMode::Hierarchical;
      if (!hierarchical) {
        node->related.insert(target->id);
        target->related.insert(node->id);
      } else if (r.kind == RefKind::SeeAlso) {
        node->narrower.insert(target->id);
        target->broader.insert(node->id);
      } else {
        node->broader.insert(target->id);
        target->narrower.insert(node->id);
      }
    }
  }

  ConceptScheme scheme = builder.build(diags);
  return {std::move(scheme), std::move(diags)};
}

}  // namespace vocab::tei
