#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vocab/indexer.hpp"
#include "vocab/model.hpp"

namespace httplib {
class Server;
}

namespace vocab::service {

/// Environment variable that overrides the config file path.
inline constexpr const char* kConfigEnvVar = "VOCAB_PIPELINE_CONFIG";

struct ServiceConfig {
  std::string listenAddress = "127.0.0.1:8080";
  std::string resolverHost = "localhost:8080";
  std::vector<std::filesystem::path> schemes;
  std::string defaultScheme;
  std::string n2tBase = "https://n2t.net/";
  std::size_t maxIndexBytes = 1 << 20;
  int defaultMaxTerms = 25;
  std::optional<std::filesystem::path> stoplist;

  /// Relative scheme and stoplist paths resolve against `base_dir`.
  static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ServiceConfig load(const std::filesystem::path& path);

  std::pair<std::string, int> listen_endpoint() const;
};

/// The config path to use: $VOCAB_PIPELINE_CONFIG when set, else `cli_path`.
std::optional<std::filesystem::path> config_path(const std::optional<std::filesystem::path>& cli_path);

/// The loaded vocabularies. Immutable; replaced as a whole on reload.
class Catalog {
 public:
  struct Located {
    const ConceptScheme* scheme;
    const Concept* node;
  };

  /// Reads every configured SKOS file. Throws ConfigError when a file is
  /// unreadable or malformed, scheme ids repeat, an ARK appears in two
  /// schemes, or the default scheme is missing.
  static std::shared_ptr<const Catalog> load(const ServiceConfig& config,
                                             std::vector<std::string>* warnings = nullptr);

  const std::vector<std::shared_ptr<const ConceptScheme>>& schemes() const { return schemes_; }
  const ConceptScheme* scheme(std::string_view id) const;
  const ConceptScheme& default_scheme() const { return *scheme(defaultScheme_); }
  std::optional<Located> find(const ArkId& id) const;

 private:
  std::vector<std::shared_ptr<const ConceptScheme>> schemes_;
  std::map<ArkId, Located> byArk_;
  std::string defaultScheme_;
};

struct Response {
  int status = 200;
  std::string contentType = "application/json";
  std::string body;
};

enum class Representation { Json, Turtle, Html };

/// Picks the representation for an Accept header; JSON when nothing
/// supported is acceptable.
Representation negotiate(std::string_view accept);

/// "ark:/..." text for a request, with "?" / "??" restored from the raw
/// request target (the HTTP layer treats them as an empty query string).
std::string ark_text_from_request(std::string_view decoded_path, std::string_view raw_target);

/// Concept wire shape: ark, scheme, prefLabel, altLabels, broader,
/// narrower, related, source.
nlohmann::ordered_json concept_json(const Concept& node);

/// Request handling independent of the HTTP transport.
class Resolver {
 public:
  /// Loads the catalog; scheme diagnostics are appended to `warnings`.
  explicit Resolver(ServiceConfig config, std::optional<std::filesystem::path> config_file = {},
                    std::vector<std::string>* warnings = nullptr);

  const ServiceConfig& config() const { return config_; }
  std::shared_ptr<const Catalog> snapshot() const;

  /// Re-reads the config file (when known) and all scheme files, then swaps
  /// the snapshot. On failure the current snapshot stays and the error is
  /// rethrown.
  void reload();

  Response resolve(std::string_view ark_text, std::string_view accept) const;
  Response search(std::string_view query, std::optional<std::string_view> scheme,
                  std::optional<std::string_view> limit) const;
  Response relation(std::string_view naan, std::string_view name, std::string_view relation) const;
  Response index(std::string_view body) const;
  Response schemes() const;

  /// Registers all routes on `server`. The resolver must outlive it.
  void mount(httplib::Server& server) const;

 private:
  std::string erc(const ConceptScheme& scheme, const Concept& node, bool full) const;
  std::string html_page(const ConceptScheme& scheme, const Concept& node) const;

  ServiceConfig config_;
  std::optional<std::filesystem::path> configFile_;
  index::RakeParams rake_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Catalog> catalog_;
};

/// Runs a Resolver on an httplib server in a background thread.
class HttpServer {
 public:
  explicit HttpServer(const Resolver& resolver);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and starts serving; port 0 picks a free port. Returns the port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vocab::service
