// vocabpipe: batch frontend for the vocabulary pipeline.
//
//   vocabpipe convert  --in tei.xml --out scheme.rdf [--hierarchy related|hierarchical]
//                      [--scheme-id S --year Y --naan N]
//   vocabpipe mint     --state minter.json --count N
//   vocabpipe validate --ark STRING [--strict]
//   vocabpipe index    --scheme scheme.rdf --doc file.txt [--max 25] [--cloud out.html|out.json]
//   vocabpipe serve    --config config.json
//
// Exit codes: 0 success, 1 error diagnostics / invalid input, 2 fatal read or parse error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <pthread.h>

#include <CLI11.hpp>

#include "vocab/ark.hpp"
#include "vocab/indexer.hpp"
#include "vocab/service.hpp"
#include "vocab/skos.hpp"
#include "vocab/tei.hpp"

namespace fs = std::filesystem;
using namespace vocab;

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file_atomic(const fs::path& path, const std::string& data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << data;
    if (!out.flush()) return false;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  return !ec;
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

int run_convert(const fs::path& in, const fs::path& out, const std::string& hierarchy,
                const std::string& scheme_id, int year, const std::string& naan) {
  auto mode = tei::parse_hierarchy_mode(hierarchy);
  if (!mode) {
    std::cerr << "unknown --hierarchy '" << hierarchy << "'\n";
    return 2;
  }
  auto document = read_file(in);
  if (!document) {
    std::cerr << "cannot read " << in << "\n";
    return 2;
  }
  tei::ParseResult parsed;
  try {
    parsed = tei::parse_tei(*document);
  } catch (const xml::MalformedXml& e) {
    std::cerr << in.string() << ": malformed XML: " << e.what() << "\n";
    return 2;
  }
  tei::CompileOptions options;
  options.schemeId = scheme_id;
  options.editionYear = year;
  options.naan = naan;
  options.hierarchy = *mode;
  options.title = scheme_id.rfind("lcsh", 0) == 0
                      ? "Library of Congress Subject Headings, " + std::to_string(year)
                      : scheme_id;
  auto compiled = tei::compile_scheme(parsed.entries, options);

  std::vector<Diagnostic> all = parsed.diagnostics;
  all.insert(all.end(), compiled.diagnostics.begin(), compiled.diagnostics.end());
  for (const auto& d : all) std::cerr << format(d) << "\n";

  std::string rdf;
  try {
    rdf = skos::serialize_skos(compiled.scheme);
  } catch (const InvalidScheme& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (!write_file_atomic(out, rdf)) {
    std::cerr << "cannot write " << out << "\n";
    return 2;
  }
  std::cerr << "wrote " << compiled.scheme.size() << " concepts to " << out.string() << "\n";
  return has_errors(all) ? 1 : 0;
}

int run_mint(const fs::path& state_path, long long count) {
  if (count < 0) {
    std::cerr << "--count must not be negative\n";
    return 1;
  }
  ark::MinterState state;
  try {
    if (fs::exists(state_path)) {
      state = ark::load_minter_state(state_path);
    } else {
      std::cerr << "initialising new minter state " << state_path.string() << " (naan "
                << state.naan << ")\n";
      ark::save_minter_state(state_path, state);
    }
    for (long long i = 0; i < count; ++i) {
      auto [id, next] = ark::mint(state);
      // The counter is on disk before the id is released.
      ark::save_minter_state(state_path, next);
      state = next;
      std::cout << id.to_string() << "\n" << std::flush;
    }
  } catch (const MinterExhausted& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_validate(const std::string& text, bool strict) {
  ark::ArkId id;
  try {
    id = ark::parse_normalized(text);
  } catch (const InvalidArk& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 1;
  }
  auto v = ark::validate(id, strict ? ark::ValidationMode::Strict : ark::ValidationMode::Lax);
  for (const auto& reason : v.reasons) std::cerr << "invalid: " << reason << "\n";
  return v.ok ? 0 : 1;
}

int run_index(const fs::path& scheme_path, const fs::path& doc_path, int max_terms,
              const std::optional<fs::path>& cloud) {
  auto rdf = read_file(scheme_path);
  if (!rdf) {
    std::cerr << "cannot read " << scheme_path << "\n";
    return 2;
  }
  auto doc = read_file(doc_path);
  if (!doc) {
    std::cerr << "cannot read " << doc_path << "\n";
    return 2;
  }
  try {
    auto parsed = skos::parse_skos(*rdf);
    for (const auto& d : parsed.diagnostics) std::cerr << format(d) << "\n";
    const std::string ext = lower_extension(doc_path);
    auto format =
        (ext == ".html" || ext == ".htm") ? index::InputFormat::Html : index::InputFormat::Txt;
    auto results = index::match_vocabulary(
        index::rake_extract(index::extract_text(*doc, format)), parsed.scheme, false);
    if (max_terms >= 0 && results.size() > static_cast<std::size_t>(max_terms)) {
      results.resize(static_cast<std::size_t>(max_terms));
    }
    for (const auto& r : results) std::cout << index::to_json(r).dump() << "\n";
    if (cloud) {
      auto cloud_format = lower_extension(*cloud) == ".json" ? index::CloudFormat::Json
                                                             : index::CloudFormat::Html;
      if (!write_file_atomic(*cloud, index::tag_cloud(results, cloud_format))) {
        std::cerr << "cannot write " << *cloud << "\n";
        return 2;
      }
    }
  } catch (const EmptyResults& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_serve(const std::optional<fs::path>& cli_config) {
  auto path = service::config_path(cli_config);
  if (!path) {
    std::cerr << "no config: pass --config or set " << service::kConfigEnvVar << "\n";
    return 1;
  }

  // Signals are handled synchronously on the main thread; block them before
  // the server spawns its workers so they inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGHUP);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<service::Resolver> resolver;
  std::string host;
  int port = 0;
  try {
    auto config = service::ServiceConfig::load(*path);
    std::tie(host, port) = config.listen_endpoint();
    std::vector<std::string> warnings;
    resolver = std::make_unique<service::Resolver>(std::move(config), *path, &warnings);
    for (const auto& w : warnings) std::cerr << w << "\n";
  } catch (const Error& e) {
    std::cerr << "bad config " << path->string() << ": " << e.what() << "\n";
    return 1;
  }

  service::HttpServer server(*resolver);
  int bound = 0;
  try {
    bound = server.start(host, port);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  std::cout << "listening on http://" << host << ":" << bound << "\n" << std::flush;

  for (;;) {
    int sig = 0;
    if (sigwait(&signals, &sig) != 0) continue;
    if (sig == SIGHUP) {
      try {
        resolver->reload();
        std::cerr << "reloaded vocabularies\n";
      } catch (const Error& e) {
        std::cerr << "reload failed, keeping previous vocabularies: " << e.what() << "\n";
      }
      continue;
    }
    break;
  }
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Historical vocabulary pipeline: TEI to SKOS conversion, ARK minting and "
               "resolution, automatic subject indexing"};
  app.require_subcommand(1);

  auto* convert = app.add_subcommand("convert", "Convert TEI vocabulary entries to SKOS RDF/XML");
  fs::path convert_in, convert_out;
  std::string hierarchy = "related";
  std::string scheme_id = "lcsh1910";
  int year = 1910;
  std::string naan = "99152";
  convert->add_option("--in", convert_in, "TEI input file")->required();
  convert->add_option("--out", convert_out, "SKOS RDF/XML output file")->required();
  convert->add_option("--hierarchy", hierarchy, "related|hierarchical")->capture_default_str();
  convert->add_option("--scheme-id", scheme_id)->capture_default_str();
  convert->add_option("--year", year, "Edition year")->capture_default_str();
  convert->add_option("--naan", naan)->capture_default_str();

  auto* mint = app.add_subcommand("mint", "Mint ARK identifiers");
  fs::path state_path;
  long long count = 1;
  mint->add_option("--state", state_path, "Minter state JSON file")->required();
  mint->add_option("--count", count, "Number of identifiers")->required();

  auto* validate = app.add_subcommand("validate", "Validate an ARK");
  std::string ark_text;
  bool strict = false;
  validate->add_option("--ark", ark_text)->required();
  validate->add_flag("--strict", strict, "Require a valid check character");

  auto* index_cmd = app.add_subcommand("index", "Suggest subject headings for a document");
  fs::path index_scheme, index_doc;
  int max_terms = 25;
  std::optional<fs::path> cloud;
  index_cmd->add_option("--scheme", index_scheme, "SKOS RDF/XML file")->required();
  index_cmd->add_option("--doc", index_doc, "Document (.txt or .html)")->required();
  index_cmd->add_option("--max", max_terms, "Maximum number of terms")->capture_default_str();
  index_cmd->add_option("--cloud", cloud, "Write a tag cloud (.html or .json)");

  auto* serve = app.add_subcommand("serve", "Run the ARK resolver and vocabulary API");
  std::optional<fs::path> config;
  serve->add_option("--config", config, "Service config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*convert) return run_convert(convert_in, convert_out, hierarchy, scheme_id, year, naan);
  if (*mint) return run_mint(state_path, count);
  if (*validate) return run_validate(ark_text, strict);
  if (*index_cmd) return run_index(index_scheme, index_doc, max_terms, cloud);
  if (*serve) return run_serve(config);
  return 2;
}
