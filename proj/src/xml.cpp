#include "vocab/xml.hpp"

#include <expat.h>

#include <memory>

namespace vocab::xml {

namespace {

constexpr char kSep = '\x1F';

void split_name(const char* qname, std::string& ns, std::string& local) {
  std::string_view name(qname);
  auto pos = name.find(kSep);
  if (pos == std::string_view::npos) {
    ns.clear();
    local = std::string(name);
  } else {
    ns = std::string(name.substr(0, pos));
    local = std::string(name.substr(pos + 1));
  }
}

struct Builder {
  XML_Parser parser = nullptr;
  std::vector<Element> stack;
  std::optional<Element> root;

  static void on_start(void* data, const char* name, const char** attrs) {
    auto* self = static_cast<Builder*>(data);
    Element el;
    split_name(name, el.ns, el.local);
    el.line = static_cast<long>(XML_GetCurrentLineNumber(self->parser));
    for (int i = 0; attrs[i] != nullptr; i += 2) {
      Attribute a;
      split_name(attrs[i], a.ns, a.local);
      a.value = attrs[i + 1];
      el.attributes.push_back(std::move(a));
    }
    if (!self->stack.empty()) el.textOffset = self->stack.back().text.size();
    self->stack.push_back(std::move(el));
  }

  static void on_end(void* data, const char*) {
    auto* self = static_cast<Builder*>(data);
    Element el = std::move(self->stack.back());
    self->stack.pop_back();
    if (self->stack.empty()) {
      self->root = std::move(el);
    } else {
      self->stack.back().children.push_back(std::move(el));
    }
  }

  static void on_text(void* data, const char* s, int len) {
    auto* self = static_cast<Builder*>(data);
    if (!self->stack.empty()) self->stack.back().text.append(s, static_cast<std::size_t>(len));
  }
};

void collect_text(const Element& el, std::string& out) {
  std::size_t done = 0;
  for (const auto& child : el.children) {
    out.append(el.text, done, child.textOffset - done);
    done = child.textOffset;
    collect_text(child, out);
  }
  out.append(el.text, done);
}

}  // namespace

const std::string* Element::attribute(std::string_view ns_uri, std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.ns == ns_uri && a.local == name) return &a.value;
  }
  return nullptr;
}

const std::string* Element::attribute_local(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.local == name) return &a.value;
  }
  return nullptr;
}

std::string Element::deep_text() const {
  std::string out;
  collect_text(*this, out);
  return out;
}

Element parse(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreateNS("UTF-8", kSep), &XML_ParserFree);
  if (!parser) throw Error("cannot allocate XML parser");
  Builder builder;
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);

  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), 1) ==
      XML_STATUS_ERROR) {
    throw MalformedXml(XML_ErrorString(XML_GetErrorCode(parser.get())),
                       static_cast<long>(XML_GetCurrentLineNumber(parser.get())),
                       static_cast<long>(XML_GetCurrentColumnNumber(parser.get())));
  }
  if (!builder.root) throw MalformedXml("no root element", 1, 0);
  return std::move(*builder.root);
}

std::string escape(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '\r': out += "&#13;"; break;
      case '\n':
      case '\t':
        if (attribute) {
          out += "&#" + std::to_string(static_cast<int>(c)) + ";";
        } else {
          out += c;
        }
        break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace vocab::xml
