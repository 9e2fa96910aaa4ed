#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vocab/error.hpp"

namespace vocab::xml {

class MalformedXml : public Error {
 public:
  MalformedXml(const std::string& what, long line, long column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  long line() const noexcept { return line_; }
  long column() const noexcept { return column_; }

 private:
  long line_;
  long column_;
};

struct Attribute {
  std::string ns;  // namespace URI, empty when unqualified
  std::string local;
  std::string value;
};

/// Element node with namespace-resolved names. Character data is kept
/// as the concatenation of the element's direct text children.
struct Element {
  std::string ns;
  std::string local;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  std::string text;
  long line = 0;
  /// Length of the parent's direct text at the point this element began.
  std::size_t textOffset = 0;

  const std::string* attribute(std::string_view ns_uri, std::string_view name) const;
  /// Matches on local name only, ignoring namespaces.
  const std::string* attribute_local(std::string_view name) const;
  /// Text of this element and all descendants in document order.
  std::string deep_text() const;
};

/// Parses a complete document. Throws MalformedXml.
Element parse(std::string_view document);

/// Escapes &, <, > and (for attributes) quotes.
std::string escape(std::string_view s, bool attribute = false);

}  // namespace vocab::xml
