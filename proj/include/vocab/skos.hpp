#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vocab/model.hpp"

namespace vocab::skos {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kSkosNs = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view kDctNs = "http://purl.org/dc/terms/";
/// Namespace of the scheme and provenance attributes (see docs/skos-format.md).
inline constexpr std::string_view kMetaNs = "urn:x-vocabpipe:meta#";

inline constexpr std::string_view kDefaultResolverHost = "id.example.org";

struct SerializeOptions {
  std::string resolverHost = std::string(kDefaultResolverHost);
};

/// "https://{host}/ark:/NAAN/NAME"
std::string concept_uri(const ArkId& id, std::string_view resolverHost);
/// "https://{host}/scheme/{schemeId}"
std::string scheme_uri(std::string_view schemeId, std::string_view resolverHost);

/// SKOS RDF/XML. Concepts appear in ascending ARK order and every set is
/// written sorted, so output is byte-stable. Throws InvalidScheme.
std::string serialize_skos(const ConceptScheme& scheme, const SerializeOptions& options = {});

struct ParseResult {
  ConceptScheme scheme;
  std::vector<Diagnostic> diagnostics;
};

/// Reads documents in the format written by serialize_skos. Throws
/// xml::MalformedXml and InvalidScheme (no usable skos:ConceptScheme).
ParseResult parse_skos(std::string_view document);

/// Turtle description of a single concept.
std::string concept_turtle(const ConceptScheme& scheme, const Concept& node,
                           std::string_view resolverHost);

}  // namespace vocab::skos
