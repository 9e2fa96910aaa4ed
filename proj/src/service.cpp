#include "vocab/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "vocab/skos.hpp"
#include "vocab/text.hpp"
#include "vocab/xml.hpp"

namespace vocab::service {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ServiceConfig c;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    if (j.contains("listenAddress")) c.listenAddress = j.at("listenAddress").get<std::string>();
    if (j.contains("resolverHost")) c.resolverHost = j.at("resolverHost").get<std::string>();
    if (j.contains("n2tBase")) c.n2tBase = j.at("n2tBase").get<std::string>();
    if (j.contains("maxIndexBytes")) c.maxIndexBytes = j.at("maxIndexBytes").get<std::size_t>();
    if (j.contains("defaultMaxTerms")) c.defaultMaxTerms = j.at("defaultMaxTerms").get<int>();
    if (j.contains("stoplist")) c.stoplist = resolve(j.at("stoplist").get<std::string>());
    for (const auto& s : j.value("schemes", nlohmann::json::array())) {
      c.schemes.push_back(resolve(s.get<std::string>()));
    }
    c.defaultScheme = j.value("defaultScheme", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (c.schemes.empty()) throw ConfigError("config lists no schemes");
  if (c.defaultMaxTerms < 0) throw ConfigError("defaultMaxTerms must not be negative");
  c.listen_endpoint();
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  return from_json(j, path.parent_path());
}

std::pair<std::string, int> ServiceConfig::listen_endpoint() const {
  auto colon = listenAddress.rfind(':');
  if (colon == std::string::npos) throw ConfigError("listenAddress must be host:port");
  int port = -1;
  std::string_view digits(listenAddress.data() + colon + 1, listenAddress.size() - colon - 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port < 0 || port > 65535) {
    throw ConfigError("invalid port in listenAddress '" + listenAddress + "'");
  }
  return {listenAddress.substr(0, colon), port};
}

std::optional<fs::path> config_path(const std::optional<fs::path>& cli_path) {
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return cli_path;
}

// ---------------------------------------------------------------------------
// Catalog

std::shared_ptr<const Catalog> Catalog::load(const ServiceConfig& config,
                                             std::vector<std::string>* warnings) {
  auto catalog = std::make_shared<Catalog>();
  for (const auto& path : config.schemes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read scheme file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    skos::ParseResult parsed = [&] {
      try {
        return skos::parse_skos(buf.str());
      } catch (const Error& e) {
        throw ConfigError("cannot load " + path.string() + ": " + e.what());
      }
    }();
    if (warnings != nullptr) {
      for (const auto& d : parsed.diagnostics) warnings->push_back(path.string() + ": " + format(d));
    }
    if (catalog->scheme(parsed.scheme.id()) != nullptr) {
      throw ConfigError("scheme id '" + parsed.scheme.id() + "' loaded twice");
    }
    catalog->schemes_.push_back(std::make_shared<const ConceptScheme>(std::move(parsed.scheme)));
  }
  for (const auto& s : catalog->schemes_) {
    for (const auto& [id, c] : s->concepts()) {
      auto [it, fresh] = catalog->byArk_.emplace(id, Located{s.get(), &c});
      if (!fresh) {
        throw ConfigError(id.to_string() + " appears in both '" + it->second.scheme->id() +
                          "' and '" + s->id() + "'");
      }
    }
  }
  if (catalog->scheme(config.defaultScheme) == nullptr) {
    throw ConfigError("defaultScheme '" + config.defaultScheme + "' is not among the loaded schemes");
  }
  catalog->defaultScheme_ = config.defaultScheme;
  return catalog;
}

const ConceptScheme* Catalog::scheme(std::string_view id) const {
  for (const auto& s : schemes_) {
    if (s->id() == id) return s.get();
  }
  return nullptr;
}

std::optional<Catalog::Located> Catalog::find(const ArkId& id) const {
  auto it = byArk_.find(ark::normalize(id).base());
  if (it == byArk_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Wire helpers

namespace {

Response json_response(int status, const ojson& body) {
  return {status, "application/json", body.dump() + "\n"};
}

Response error_response(int status, std::string_view message) {
  return json_response(status, ojson{{"error", message}});
}

ojson sorted_ids(const std::set<ArkId>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.to_string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ojson concept_json(const Concept& c) {
  ojson source = nullptr;
  if (c.source) {
    source = ojson::object();
    source["page"] = c.source->page ? ojson(*c.source->page) : ojson(nullptr);
    source["entryId"] = c.source->entryId ? ojson(*c.source->entryId) : ojson(nullptr);
  }
  return ojson{{"ark", c.id.base().to_string()},
               {"scheme", c.schemeId},
               {"prefLabel", c.prefLabel},
               {"altLabels", ojson(std::vector<std::string>(c.altLabels.begin(), c.altLabels.end()))},
               {"broader", sorted_ids(c.broader)},
               {"narrower", sorted_ids(c.narrower)},
               {"related", sorted_ids(c.related)},
               {"source", source}};
}

Representation negotiate(std::string_view accept) {
  struct Choice {
    Representation rep;
    double q;
  };
  std::optional<Choice> best;
  std::istringstream in{std::string(accept)};
  std::string item;
  while (std::getline(in, item, ',')) {
    auto semi = item.find(';');
    std::string type = lowercase(trim(item.substr(0, semi)));
    double q = 1.0;
    if (semi != std::string::npos) {
      std::istringstream params(item.substr(semi + 1));
      std::string p;
      while (std::getline(params, p, ';')) {
        p = trim(p);
        if (p.rfind("q=", 0) == 0) {
          try {
            q = std::stod(p.substr(2));
          } catch (const std::exception&) {
            q = 0;
          }
        }
      }
    }
    std::optional<Representation> rep;
    if (type == "application/json" || type == "*/*" || type == "application/*") {
      rep = Representation::Json;
    } else if (type == "text/turtle") {
      rep = Representation::Turtle;
    } else if (type == "text/html" || type == "application/xhtml+xml" || type == "text/*") {
      rep = Representation::Html;
    }
    if (rep && q > 0 && (!best || q > best->q)) best = Choice{*rep, q};
  }
  return best ? best->rep : Representation::Json;
}

std::string ark_text_from_request(std::string_view decoded_path, std::string_view raw_target) {
  std::string out(decoded_path);
  if (!out.empty() && out.front() == '/') out.erase(0, 1);
  auto fragment = raw_target.find('#');
  if (fragment != std::string_view::npos) raw_target = raw_target.substr(0, fragment);
  auto query = raw_target.find('?');
  if (query != std::string_view::npos) {
    std::string_view rest = raw_target.substr(query);
    if (rest == "?" || rest == "??") out += rest;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolver

Resolver::Resolver(ServiceConfig config, std::optional<fs::path> config_file,
                   std::vector<std::string>* warnings)
    : config_(std::move(config)), configFile_(std::move(config_file)) {
  if (config_.stoplist) {
    rake_.stoplist = std::make_shared<const index::Stoplist>(index::load_stoplist(*config_.stoplist));
  }
  rake_.validate();
  catalog_ = Catalog::load(config_, warnings);
}

std::shared_ptr<const Catalog> Resolver::snapshot() const {
  std::lock_guard lock(mutex_);
  return catalog_;
}

void Resolver::reload() {
  ServiceConfig next = configFile_ ? ServiceConfig::load(*configFile_) : config_;
  // The listening socket and limits stay; only the vocabularies change.
  ServiceConfig effective = config_;
  effective.schemes = next.schemes;
  effective.defaultScheme = next.defaultScheme;
  auto catalog = Catalog::load(effective);
  std::lock_guard lock(mutex_);
  catalog_ = std::move(catalog);
}

std::string Resolver::erc(const ConceptScheme& scheme, const Concept& node, bool full) const {
  const std::string where = skos::concept_uri(node.id, config_.resolverHost);
  auto one_line = [](std::string_view s) { return text::collapse_whitespace(s); };
  std::string out;
  out += "who: " + one_line(scheme.info().title) + "\n";
  out += "what: " + one_line(node.prefLabel) + "\n";
  out += "when: " + std::to_string(scheme.info().editionYear) + "\n";
  out += "where: " + where + "\n";
  if (full) {
    out += "\n";
    out += "erc-support:\n";
    out += "who: " + one_line(scheme.info().title) + "\n";
    out += "what: permanent: this identifier will not be reassigned; the concept description "
           "is preserved unchanged for the " +
           std::to_string(scheme.info().editionYear) + " edition\n";
    out += "when: " + std::to_string(scheme.info().editionYear) + "\n";
    out += "where: https://" + config_.resolverHost + "/\n";
  }
  return out;
}

std::string Resolver::html_page(const ConceptScheme& scheme, const Concept& node) const {
  const std::string ark_text = node.id.base().to_string();
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
      << xml::escape(node.prefLabel) << "</title>\n</head>\n<body>\n"
      << "<h1>" << xml::escape(node.prefLabel) << "</h1>\n"
      << "<p>" << xml::escape(scheme.info().title) << " (" << scheme.info().editionYear << ")</p>\n"
      << "<p>Identifier: <code>" << xml::escape(ark_text) << "</code></p>\n";
  if (!node.altLabels.empty()) {
    out << "<h2>Used for</h2>\n<ul>\n";
    for (const auto& alt : node.altLabels) out << "<li>" << xml::escape(alt) << "</li>\n";
    out << "</ul>\n";
  }
  for (auto rel : {Relation::Broader, Relation::Narrower, Relation::Related}) {
    const auto& ids = links(node, rel);
    if (ids.empty()) continue;
    out << "<h2>" << to_string(rel) << "</h2>\n<ul>\n";
    for (const auto& id : ids) {
      const Concept* other = get_concept(scheme, id);
      out << "<li><a href=\"/" << xml::escape(id.to_string(), true) << "\">"
          << xml::escape(other ? other->prefLabel : id.to_string()) << "</a></li>\n";
    }
    out << "</ul>\n";
  }
  out << "<p>Also resolvable at <a href=\"" << xml::escape(config_.n2tBase + ark_text, true)
      << "\">" << xml::escape(config_.n2tBase + ark_text) << "</a></p>\n"
      << "</body>\n</html>\n";
  return out.str();
}

Response Resolver::resolve(std::string_view ark_text, std::string_view accept) const {
  ArkId id;
  try {
    id = ark::parse_normalized(ark_text);
  } catch (const InvalidArk& e) {
    return error_response(400, std::string("invalid ARK: ") + e.what());
  }
  if (auto v = ark::validate(id, ark::ValidationMode::Lax); !v.ok) {
    return error_response(400, "invalid ARK: " + v.reasons.front());
  }
  auto catalog = snapshot();
  auto found = catalog->find(id);
  if (!found) return error_response(404, "not found");
  const ConceptScheme& scheme = *found->scheme;
  const Concept& node = *found->node;

  if (id.inflection != ark::Inflection::None) {
    return {200, "text/plain; charset=utf-8", erc(scheme, node, id.inflection == ark::Inflection::Full)};
  }
  Representation rep = negotiate(accept);
  if (id.qualifier == "/skos" || id.qualifier == ".skos") {
    rep = Representation::Turtle;
  } else if (id.qualifier == "/json" || id.qualifier == ".json") {
    rep = Representation::Json;
  } else if (!id.qualifier.empty()) {
    return error_response(404, "unsupported qualifier '" + id.qualifier + "'");
  }
  switch (rep) {
    case Representation::Turtle:
      return {200, "text/turtle; charset=utf-8",
              skos::concept_turtle(scheme, node, config_.resolverHost)};
    case Representation::Html:
      return {200, "text/html; charset=utf-8", html_page(scheme, node)};
    case Representation::Json:
      break;
  }
  return json_response(200, concept_json(node));
}

Response Resolver::search(std::string_view query, std::optional<std::string_view> scheme_id,
                          std::optional<std::string_view> limit_text) const {
  const std::string needle = text::normalize_label(query);
  if (needle.empty()) return error_response(400, "query parameter q must not be empty");
  std::size_t limit = 20;
  if (limit_text) {
    int value = -1;
    auto [ptr, ec] = std::from_chars(limit_text->data(), limit_text->data() + limit_text->size(), value);
    if (ec != std::errc{} || ptr != limit_text->data() + limit_text->size() || value < 0) {
      return error_response(400, "limit must be a non-negative integer");
    }
    limit = static_cast<std::size_t>(value);
  }
  auto catalog = snapshot();
  std::vector<const ConceptScheme*> targets;
  if (scheme_id) {
    const ConceptScheme* s = catalog->scheme(*scheme_id);
    if (s == nullptr) return error_response(400, "unknown scheme '" + std::string(*scheme_id) + "'");
    targets.push_back(s);
  } else {
    for (const auto& s : catalog->schemes()) targets.push_back(s.get());
  }

  struct Hit {
    const Concept* node;
    LabelKind kind;
    std::string matched;
    std::string sortKey;
  };
  std::map<ArkId, Hit> hits;
  for (const ConceptScheme* s : targets) {
    for (const auto& [label, entries] : s->label_index()) {
      if (label.find(needle) == std::string::npos) continue;
      for (const auto& entry : entries) {
        const Concept* c = get_concept(*s, entry.id);
        std::string matched = c->prefLabel;
        if (entry.kind == LabelKind::Alt) {
          for (const auto& alt : c->altLabels) {
            if (text::normalize_label(alt) == label) {
              matched = alt;
              break;
            }
          }
        }
        Hit hit{c, entry.kind, std::move(matched), text::normalize_label(c->prefLabel)};
        auto [it, fresh] = hits.try_emplace(c->id, hit);
        if (!fresh && ((hit.kind == LabelKind::Pref && it->second.kind == LabelKind::Alt) ||
                       (hit.kind == it->second.kind && hit.matched < it->second.matched))) {
          it->second = std::move(hit);
        }
      }
    }
  }
  std::vector<Hit> ordered;
  for (auto& [id, hit] : hits) ordered.push_back(std::move(hit));
  std::stable_sort(ordered.begin(), ordered.end(), [](const Hit& a, const Hit& b) {
    if (a.kind != b.kind) return a.kind == LabelKind::Pref;
    if (a.sortKey != b.sortKey) return a.sortKey < b.sortKey;
    return a.node->id < b.node->id;
  });
  if (ordered.size() > limit) ordered.resize(limit);

  ojson out = ojson::array();
  for (const auto& hit : ordered) {
    out.push_back(ojson{{"labelKind", std::string(to_string(hit.kind))},
                        {"matchedLabel", hit.matched},
                        {"concept", concept_json(*hit.node)}});
  }
  return json_response(200, out);
}

Response Resolver::relation(std::string_view naan, std::string_view name,
                            std::string_view relation_name) const {
  auto rel = parse_relation(relation_name);
  if (!rel) return error_response(400, "unknown relation '" + std::string(relation_name) + "'");
  ArkId id;
  try {
    id = ark::parse_normalized("ark:/" + std::string(naan) + "/" + std::string(name));
  } catch (const InvalidArk& e) {
    return error_response(400, std::string("invalid ARK: ") + e.what());
  }
  auto catalog = snapshot();
  auto found = catalog->find(id);
  if (!found) return error_response(404, "not found");
  ojson out = ojson::array();
  for (const auto& target : traverse(*found->scheme, id, *rel, 1)) {
    out.push_back(concept_json(*get_concept(*found->scheme, target)));
  }
  return json_response(200, out);
}

Response Resolver::index(std::string_view body) const {
  if (body.size() > config_.maxIndexBytes) {
    return error_response(413, "request body exceeds " + std::to_string(config_.maxIndexBytes) + " bytes");
  }
  auto request = nlohmann::json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) {
    return error_response(400, "request body must be a JSON object");
  }
  if (!request.contains("text") || !request["text"].is_string() ||
      request["text"].get<std::string>().empty()) {
    return error_response(400, "text must be a non-empty string");
  }
  index::InputFormat format = index::InputFormat::Txt;
  if (request.contains("format")) {
    if (request["format"] == "html") {
      format = index::InputFormat::Html;
    } else if (request["format"] != "txt") {
      return error_response(400, "format must be 'txt' or 'html'");
    }
  }
  int max_terms = config_.defaultMaxTerms;
  if (request.contains("maxTerms")) {
    if (!request["maxTerms"].is_number_integer() || request["maxTerms"].get<int>() < 0) {
      return error_response(400, "maxTerms must be a non-negative integer");
    }
    max_terms = request["maxTerms"].get<int>();
  }
  bool uninvert = false;
  if (request.contains("uninvert")) {
    if (!request["uninvert"].is_boolean()) return error_response(400, "uninvert must be a boolean");
    uninvert = request["uninvert"].get<bool>();
  }

  auto catalog = snapshot();
  std::string scheme_id = request.value("scheme", catalog->default_scheme().id());
  const ConceptScheme* scheme = catalog->scheme(scheme_id);
  if (scheme == nullptr) return error_response(400, "unknown scheme '" + scheme_id + "'");

  std::string plain;
  try {
    plain = index::extract_text(request["text"].get<std::string>(), format);
  } catch (const InvalidEncoding& e) {
    return error_response(400, e.what());
  }
  auto results = index::match_vocabulary(index::rake_extract(plain, rake_), *scheme, uninvert);
  if (results.size() > static_cast<std::size_t>(max_terms)) results.resize(max_terms);
  ojson out = ojson::array();
  for (const auto& r : results) out.push_back(index::to_json(r));
  return json_response(200, out);
}

Response Resolver::schemes() const {
  auto catalog = snapshot();
  ojson out = ojson::array();
  for (const auto& s : catalog->schemes()) {
    out.push_back(ojson{{"schemeId", s->id()},
                        {"title", s->info().title},
                        {"editionYear", s->info().editionYear},
                        {"conceptCount", s->size()}});
  }
  return json_response(200, out);
}

namespace {

void apply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.contentType);
}

std::optional<std::string_view> param(const httplib::Request& req, const char* name) {
  auto it = req.params.find(name);
  if (it == req.params.end()) return std::nullopt;
  return std::string_view(it->second);
}

}  // namespace

void Resolver::mount(httplib::Server& server) const {
  server.set_payload_max_length(config_.maxIndexBytes);
  server.Get(R"(/ark:.*)", [this](const httplib::Request& req, httplib::Response& res) {
    apply(res, resolve(ark_text_from_request(req.path, req.target), req.get_header_value("Accept")));
    res.set_header("Vary", "Accept");
  });
  server.Get("/api/v1/search", [this](const httplib::Request& req, httplib::Response& res) {
    auto q = param(req, "q");
    apply(res, search(q ? *q : std::string_view(), param(req, "scheme"), param(req, "limit")));
  });
  server.Get(R"(/api/v1/concepts/([^/]+)/([^/]+)/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               apply(res, relation(req.matches[1].str(), req.matches[2].str(), req.matches[3].str()));
             });
  server.Post("/api/v1/index", [this](const httplib::Request& req, httplib::Response& res) {
    apply(res, index(req.body));
  });
  server.Get("/api/v1/schemes", [this](const httplib::Request&, httplib::Response& res) {
    apply(res, schemes());
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* message = res.status == 404   ? "not found"
                          : res.status == 413 ? "payload too large"
                                              : httplib::status_message(res.status);
    res.set_content(ojson{{"error", message}}.dump() + "\n", "application/json");
  });
  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(ojson{{"error", message}}.dump() + "\n", "application/json");
      });
}

// ---------------------------------------------------------------------------
// HttpServer

struct HttpServer::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(const Resolver& resolver) : impl_(std::make_unique<Impl>()) {
  impl_->server.set_tcp_nodelay(true);
  resolver.mount(impl_->server);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace vocab::service
