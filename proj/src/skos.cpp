#include "vocab/skos.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "vocab/text.hpp"
#include "vocab/xml.hpp"

namespace vocab::skos {

std::string concept_uri(const ArkId& id, std::string_view resolverHost) {
  return "https://" + std::string(resolverHost) + "/" + id.base().to_string();
}

std::string scheme_uri(std::string_view schemeId, std::string_view resolverHost) {
  return "https://" + std::string(resolverHost) + "/scheme/" + std::string(schemeId);
}

std::string serialize_skos(const ConceptScheme& scheme, const SerializeOptions& options) {
  if (auto problems = check_invariants(scheme); !problems.empty()) {
    throw InvalidScheme("scheme '" + scheme.id() + "' violates invariants: " + problems.front());
  }
  const auto& info = scheme.info();
  const std::string& host = options.resolverHost;
  const std::string in_scheme = xml::escape(scheme_uri(info.schemeId, host), true);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<rdf:RDF xmlns:rdf=\"" << kRdfNs << "\"\n"
      << "         xmlns:skos=\"" << kSkosNs << "\"\n"
      << "         xmlns:dct=\"" << kDctNs << "\"\n"
      << "         xmlns:vp=\"" << kMetaNs << "\">\n";
  out << "  <skos:ConceptScheme rdf:about=\"" << in_scheme << "\"\n"
      << "      dct:title=\"" << xml::escape(info.title, true) << "\"\n"
      << "      vp:schemeId=\"" << xml::escape(info.schemeId, true) << "\"\n"
      << "      vp:editionYear=\"" << info.editionYear << "\"\n"
      << "      vp:naan=\"" << xml::escape(info.naan, true) << "\"/>\n";

  auto resource = [&](std::string_view property, const std::set<ArkId>& ids) {
    for (const auto& id : ids) {
      out << "    <skos:" << property << " rdf:resource=\""
          << xml::escape(concept_uri(id, host), true) << "\"/>\n";
    }
  };
  for (const auto& [id, c] : scheme.concepts()) {
    out << "  <skos:Concept rdf:about=\"" << xml::escape(concept_uri(id, host), true) << "\"";
    if (c.source && c.source->page) out << " vp:page=\"" << *c.source->page << "\"";
    if (c.source && c.source->entryId) {
      out << " vp:entryId=\"" << xml::escape(*c.source->entryId, true) << "\"";
    }
    out << ">\n";
    out << "    <skos:prefLabel>" << xml::escape(c.prefLabel) << "</skos:prefLabel>\n";
    for (const auto& alt : c.altLabels) {
      out << "    <skos:altLabel>" << xml::escape(alt) << "</skos:altLabel>\n";
    }
    resource("broader", c.broader);
    resource("narrower", c.narrower);
    resource("related", c.related);
    out << "    <skos:inScheme rdf:resource=\"" << in_scheme << "\"/>\n";
    out << "  </skos:Concept>\n";
  }
  out << "</rdf:RDF>\n";
  return out.str();
}

namespace {

std::optional<int> to_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool is(const xml::Element& el, std::string_view ns, std::string_view local) {
  return el.ns == ns && el.local == local;
}

}  // namespace

ParseResult parse_skos(std::string_view document) {
  xml::Element root = xml::parse(document);
  if (!is(root, kRdfNs, "RDF")) {
    throw InvalidScheme("root element is not rdf:RDF");
  }

  std::vector<Diagnostic> diags;
  auto warn = [&diags](DiagnosticCode code, std::string msg,
                       std::optional<std::string> entry = std::nullopt) {
    diags.push_back({code, Severity::Warning, std::move(entry), std::move(msg)});
  };

  const xml::Element* scheme_node = nullptr;
  for (const auto& child : root.children) {
    if (is(child, kSkosNs, "ConceptScheme")) {
      if (scheme_node == nullptr) {
        scheme_node = &child;
      } else {
        warn(DiagnosticCode::UnknownElement, "additional skos:ConceptScheme ignored");
      }
    }
  }
  if (scheme_node == nullptr) throw InvalidScheme("document has no skos:ConceptScheme");

  SchemeInfo info;
  auto meta = [&](std::string_view name) -> std::string {
    const std::string* v = scheme_node->attribute(kMetaNs, name);
    return v ? *v : std::string();
  };
  info.schemeId = meta("schemeId");
  info.naan = meta("naan");
  if (const std::string* title = scheme_node->attribute(kDctNs, "title")) info.title = *title;
  for (const auto& child : scheme_node->children) {
    if (is(child, kDctNs, "title") && info.title.empty()) info.title = child.text;
  }
  if (info.schemeId.empty()) throw InvalidScheme("skos:ConceptScheme lacks vp:schemeId");
  if (auto year = to_int(meta("editionYear"))) {
    info.editionYear = *year;
  } else {
    warn(DiagnosticCode::UnknownElement, "scheme editionYear missing or not an integer");
  }

  const std::string* about_attr = scheme_node->attribute(kRdfNs, "about");
  const std::string scheme_about = about_attr ? *about_attr : std::string();

  SchemeBuilder builder(info);
  std::unordered_set<std::string> seen_about;
  for (const auto& node : root.children) {
    if (is(node, kSkosNs, "ConceptScheme")) continue;
    if (!is(node, kSkosNs, "Concept")) {
      warn(DiagnosticCode::UnknownElement, "ignored top-level <" + node.local + ">");
      continue;
    }
    const std::string* about = node.attribute(kRdfNs, "about");
    if (about == nullptr) {
      warn(DiagnosticCode::UnknownElement,
           "skos:Concept without rdf:about at line " + std::to_string(node.line) + " ignored");
      continue;
    }
    Concept c;
    try {
      c.id = ark::parse_normalized(*about).base();
    } catch (const InvalidArk& e) {
      warn(DiagnosticCode::UnknownElement, "concept URI '" + *about + "' is not an ARK: " + e.what());
      continue;
    }
    const std::string who = c.id.to_string();
    if (!seen_about.insert(who).second) {
      diags.push_back({DiagnosticCode::DuplicateId, Severity::Error, std::nullopt,
                       "concept " + who + " described more than once; later element dropped"});
      continue;
    }

    SourceRef source;
    if (const std::string* page = node.attribute(kMetaNs, "page")) {
      source.page = to_int(*page);
      if (!source.page || *source.page < 1) {
        source.page.reset();
        warn(DiagnosticCode::UnknownElement, who + ": ignored invalid vp:page '" + *page + "'");
      }
    }
    if (const std::string* entry = node.attribute(kMetaNs, "entryId")) source.entryId = *entry;
    if (!source.empty()) c.source = source;
    const std::optional<std::string> tag = source.entryId;

    bool have_pref = false;
    for (const auto& prop : node.children) {
      if (prop.ns != kSkosNs) {
        warn(DiagnosticCode::UnknownElement, who + ": ignored property <" + prop.local + ">", tag);
        continue;
      }
      auto target = [&]() -> std::optional<ArkId> {
        const std::string* res = prop.attribute(kRdfNs, "resource");
        if (res == nullptr) {
          warn(DiagnosticCode::UnknownElement, who + ": skos:" + prop.local + " without rdf:resource",
               tag);
          return std::nullopt;
        }
        try {
          return ark::parse_normalized(*res).base();
        } catch (const InvalidArk&) {
          warn(DiagnosticCode::DanglingRef, who + ": skos:" + prop.local + " target '" + *res +
                                                "' is not an ARK",
               tag);
          return std::nullopt;
        }
      };
      if (prop.local == "prefLabel") {
        if (have_pref) {
          diags.push_back({DiagnosticCode::MultiplePref, Severity::Warning, tag,
                           who + ": extra skos:prefLabel '" + prop.text + "' ignored"});
        } else {
          c.prefLabel = prop.text;
          have_pref = true;
        }
      } else if (prop.local == "altLabel") {
        c.altLabels.insert(prop.text);
      } else if (prop.local == "broader" || prop.local == "narrower" || prop.local == "related") {
        if (auto id = target()) {
          auto& set = prop.local == "broader"    ? c.broader
                      : prop.local == "narrower" ? c.narrower
                                                 : c.related;
          set.insert(*id);
        }
      } else if (prop.local == "inScheme") {
        const std::string* res = prop.attribute(kRdfNs, "resource");
        if (res == nullptr || *res != scheme_about) {
          warn(DiagnosticCode::UnknownElement, who + ": skos:inScheme names another scheme", tag);
        }
      } else {
        warn(DiagnosticCode::UnknownElement, who + ": ignored property skos:" + prop.local, tag);
      }
    }
    if (!have_pref || text::normalize_label(c.prefLabel).empty()) {
      diags.push_back({DiagnosticCode::MissingPrefLabel, Severity::Error, tag,
                       who + " has no skos:prefLabel; concept dropped"});
      continue;
    }
    builder.add(std::move(c), diags);
  }

  ConceptScheme scheme = builder.build(diags, {.warnOnInverseCompletion = true});
  return {std::move(scheme), std::move(diags)};
}

namespace {

std::string turtle_literal(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string concept_turtle(const ConceptScheme& scheme, const Concept& node,
                           std::string_view resolverHost) {
  std::vector<std::string> statements;
  statements.push_back("skos:prefLabel " + turtle_literal(node.prefLabel));
  for (const auto& alt : node.altLabels) statements.push_back("skos:altLabel " + turtle_literal(alt));
  auto links_to = [&](std::string_view property, const std::set<ArkId>& ids) {
    for (const auto& id : ids) {
      statements.push_back("skos:" + std::string(property) + " <" + concept_uri(id, resolverHost) +
                           ">");
    }
  };
  links_to("broader", node.broader);
  links_to("narrower", node.narrower);
  links_to("related", node.related);
  statements.push_back("skos:inScheme <" + scheme_uri(scheme.id(), resolverHost) + ">");

  std::string out = "@prefix skos: <" + std::string(kSkosNs) + "> .\n\n";
  out += "<" + concept_uri(node.id, resolverHost) + "> a skos:Concept";
  for (const auto& st : statements) out += " ;\n    " + st;
  out += " .\n";
  return out;
}

}  // namespace vocab::skos
