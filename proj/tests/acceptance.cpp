// Acceptance run: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "support/fixtures.hpp"
#include "support/rake_oracle.hpp"
#include "vocab/indexer.hpp"
#include "vocab/service.hpp"
#include "vocab/skos.hpp"
#include "vocab/tei.hpp"
#include "vocab/text.hpp"

using namespace vocab;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool report(int n, const char* name, double limit_s, const std::function<Outcome()>& body) {
  auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double elapsed = seconds_since(start);
  if (o.ok && limit_s > 0 && elapsed >= limit_s) {
    o.ok = false;
    o.detail = "runtime limit exceeded";
  }
  char limit[48];
  if (limit_s > 0) {
    std::snprintf(limit, sizeof limit, "limit %.0fs", limit_s);
  } else {
    std::snprintf(limit, sizeof limit, "limits: load 5s, p95 50ms");
  }
  std::printf("criterion %d %-28s %s  %.3fs (%s)%s%s\n", n, name, o.ok ? "PASS" : "FAIL", elapsed,
              limit, o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
  return o.ok;
}

std::vector<std::string> distinct_labels(std::mt19937& rng, std::size_t n, int max_words) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  while (out.size() < n) {
    std::string l = vocab::testing::make_label(rng, 1 + static_cast<int>(rng() % max_words));
    if (seen.insert(text::normalize_label(l)).second) out.push_back(l);
  }
  return out;
}

// 1. Conversion rule fidelity.
Outcome conversion_fidelity() {
  Outcome o;
  std::mt19937 rng(1910);
  auto labels = distinct_labels(rng, 100, 3);
  std::vector<tei::VocabEntry> entries;
  std::vector<std::pair<std::string, std::string>> sees;  // (source, target)
  for (int i = 0; i < 100; ++i) {
    tei::VocabEntry e{"e" + std::to_string(i + 1), labels[i], {}, 1 + i / 25};
    if (i % 5 == 4) {
      // Targets are earlier authorized headings.
      const std::string& target = labels[i - 1 - static_cast<int>(rng() % 3)];
      e.refs.push_back({tei::RefKind::See, target});
      sees.emplace_back(e.headword, target);
    }
    entries.push_back(std::move(e));
  }
  o.require(sees.size() == 20, "fixture must hold 20 see references");
  auto parsed = tei::parse_tei(vocab::testing::tei_document(entries));
  o.require(parsed.entries == entries, "TEI parse did not reproduce the corpus");
  auto compiled = tei::compile_scheme(parsed.entries);
  o.require(!has_errors(compiled.diagnostics), "error diagnostics during compile");
  o.require(compiled.scheme.size() == 80, "expected 80 concepts, got " + std::to_string(compiled.scheme.size()));
  for (const auto& [source, target] : sees) {
    auto hit = find_by_label(compiled.scheme, target);
    o.require(hit && hit->kind == LabelKind::Pref && hit->node->altLabels.count(source),
              "'" + source + "' is not an altLabel of '" + target + "'");
    auto back = find_by_label(compiled.scheme, source);
    o.require(back && back->kind == LabelKind::Alt && back->node == hit->node,
              "'" + source + "' does not resolve to its authorized term");
  }
  int violations = 0;
  for (const auto& [id, c] : compiled.scheme.concepts()) {
    const std::string pref = text::normalize_label(c.prefLabel);
    for (const auto& alt : c.altLabels) violations += text::normalize_label(alt) == pref;
  }
  o.require(violations == 0, std::to_string(violations) + " pref/alt disjointness violations");
  o.require(check_invariants(compiled.scheme).empty(), "scheme invariants violated");
  return o;
}

// 2. SKOS round trip.
Outcome round_trip() {
  Outcome o;
  std::mt19937 rng(200);
  for (int i = 0; i < 200 && o.ok; ++i) {
    auto scheme = vocab::testing::random_scheme(rng, 50, "rt" + std::to_string(i));
    const std::string a = skos::serialize_skos(scheme);
    const std::string b = skos::serialize_skos(scheme);
    o.require(a == b, "serialize not byte-deterministic on scheme " + std::to_string(i));
    auto parsed = skos::parse_skos(a);
    o.require(parsed.scheme == scheme, "round trip differs on scheme " + std::to_string(i));
    o.require(skos::serialize_skos(parsed.scheme) == a, "re-serialization differs on scheme " + std::to_string(i));
  }
  return o;
}

// 3. ARK integrity.
Outcome ark_integrity() {
  Outcome o;
  ark::MinterState state;
  std::set<std::string> names;
  ArkId fixture;
  for (int i = 0; i < 10000; ++i) {
    auto [id, next] = ark::mint(state);
    if (i == 0) fixture = id;
    o.require(ark::validate(id, ark::ValidationMode::Strict).ok, "minted id fails strict: " + id.to_string());
    names.insert(id.name);
    state = next;
  }
  o.require(names.size() == 10000, "minted ids are not unique");

  const std::string naan = fixture.naan;
  const std::string name = fixture.name;
  o.require(naan.size() + 1 + name.size() <= 28, "fixture id too long");
  int mutations = 0, detected = 0;
  auto check = [&](const std::string& n, const std::string& m) {
    ++mutations;
    ArkId id{n, m, {}, ark::Inflection::None};
    detected += !ark::validate(id, ark::ValidationMode::Strict).ok;
  };
  for (std::size_t pos = 0; pos < name.size(); ++pos) {
    for (char c : ark::kAlphabet) {
      if (c == name[pos]) continue;
      std::string m = name;
      m[pos] = c;
      check(naan, m);
    }
  }
  for (std::size_t pos = 0; pos < naan.size(); ++pos) {
    for (char c : ark::kAlphabet) {
      if (c == naan[pos]) continue;
      std::string n = naan;
      n[pos] = c;
      check(n, name);
    }
  }
  o.require(detected == mutations, std::to_string(mutations - detected) + " of " + std::to_string(mutations) +
                                       " substitutions undetected");

  for (const char* published : {"ark:/99152/b4057cr7r", "ark:/99152/b47p8tc5z"}) {
    ArkId id = ark::parse_normalized(published);
    o.require(ark::validate(id, ark::ValidationMode::Lax).ok, std::string(published) + " fails lax validation");
    o.require(id.to_string() == published, std::string(published) + " does not render back");
  }
  const ArkId base = ark::parse_normalized("ark:/99152/b47p8tc5z");
  for (const char* variant : {"ark:/99152/b4-7p8-tc5z", "ARK:/99152/B47P8TC5Z", "ark:99152/B4-7P8TC5Z",
                              "https://id.cci.drexel.edu/ark:/99152/b47p8tc5z",
                              "https://n2t.net/ark:/99152/b47p8tc5z"}) {
    o.require(ark::parse_normalized(variant) == base, std::string(variant) + " does not normalize");
  }
  return o;
}

// 4. RAKE against the brute-force oracle.
Outcome rake_oracle() {
  Outcome o;
  auto compare = [&](const std::vector<std::string>& tokens, const index::RakeParams& p) {
    std::string doc;
    for (const auto& t : tokens) doc += t + " ";
    auto got = index::rake_extract(doc, p);
    auto want = vocab::testing::oracle_rake(tokens, *p.stoplist, p.minCharLength, p.maxWordsPerPhrase,
                                            p.minKeywordFrequency);
    o.require(got.size() == want.size(), "phrase count differs on: " + doc);
    for (std::size_t i = 0; o.ok && i < got.size(); ++i) {
      o.require(got[i].text == want[i].text, "phrase order differs on: " + doc);
      o.require(vocab::testing::same_value(want[i].score, got[i].score.num(), got[i].score.den()),
                "score differs for '" + got[i].text + "' on: " + doc);
    }
    return got;
  };

  index::RakeParams fixture_params;
  fixture_params.stoplist = std::make_shared<const index::Stoplist>(index::Stoplist{"the", "of"});
  auto fixture = compare({"red", "apples", ",", "red", "wine"}, fixture_params);
  o.require(fixture.size() == 2 && fixture[0].score == index::Rational(4) && fixture[1].score == index::Rational(4),
            "'red apples, red wine' must give two phrases scoring 4");

  const std::vector<std::string> alphabet = {"optics", "light", "lens",  "refraction", "glass",
                                             "prism",  "red",   "wine",  "apples",     "colour",
                                             "the",    "of",    "and",   "with",       "ox",
                                             "1910",   ",",     ".",     ";",          "!"};
  std::mt19937 rng(50);
  for (int i = 0; i < 50 && o.ok; ++i) {
    std::vector<std::string> tokens;
    const int n = 1 + static_cast<int>(rng() % 50);
    for (int k = 0; k < n; ++k) tokens.push_back(alphabet[rng() % alphabet.size()]);
    compare(tokens, index::RakeParams{});
  }
  return o;
}

// 5. Planted-term retrieval.
Outcome planted_terms() {
  Outcome o;
  std::mt19937 rng(15);
  auto labels = distinct_labels(rng, 200, 3);
  std::vector<std::pair<std::string, std::vector<std::string>>> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({labels[i], {labels[100 + i]}});
  auto scheme = vocab::testing::scheme_from_labels(pairs, "planted");
  o.require(scheme.size() == 100, "fixture scheme must hold 100 concepts");

  std::vector<int> order(100);
  for (int i = 0; i < 100; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::map<ArkId, LabelKind> expected;
  const std::vector<std::string> seps = {" and the ", ". ", " of ", ", ", " with a "};
  std::string doc = "This document is about ";
  for (int k = 0; k < 15; ++k) {
    const int i = order[k];
    const bool alt = k >= 10;
    const std::string& label = alt ? pairs[i].second[0] : pairs[i].first;
    expected[find_by_label(scheme, pairs[i].first)->node->id] = alt ? LabelKind::Alt : LabelKind::Pref;
    doc += label + seps[k % seps.size()];
  }
  auto results = index::match_vocabulary(index::rake_extract(doc), scheme, false);
  std::set<ArkId> covered;
  for (const auto& r : results) {
    auto it = expected.find(r.conceptId);
    if (it == expected.end()) continue;
    covered.insert(r.conceptId);
    const Concept* c = get_concept(scheme, r.conceptId);
    o.require(r.prefLabel == c->prefLabel, "result prefLabel is not the authorized label");
    o.require(r.labelKind == it->second, "wrong labelKind for " + r.matchedLabel);
    if (r.labelKind == LabelKind::Alt) {
      o.require(c->altLabels.count(r.matchedLabel) == 1, "alt match does not resolve to its authorized concept");
    }
  }
  o.require(covered.size() == 15, "covered " + std::to_string(covered.size()) + " of 15 planted concepts");
  return o;
}

// Twenty-concept linked fixture holding the published example identifier.
ConceptScheme resolver_fixture() {
  SchemeBuilder b({"lcsh1910", "Library of Congress Subject Headings, 1910", 1910, "99152"});
  std::vector<Diagnostic> diags;
  std::mt19937 rng(20);
  auto labels = distinct_labels(rng, 20, 2);
  ark::MinterState m;
  std::vector<ArkId> ids;
  for (int i = 0; i < 20; ++i) {
    Concept c;
    if (i == 0) {
      c.id = ark::parse("ark:/99152/b47p8tc5z");
      c.prefLabel = "Optics";
      c.altLabels = {"Aberration"};
    } else {
      auto [id, next] = ark::mint(m);
      m = next;
      c.id = id;
      c.prefLabel = labels[i];
    }
    ids.push_back(c.id);
    b.add(std::move(c), diags);
  }
  for (int i = 1; i < 20; ++i) {
    Concept* c = b.find(ids[i]);
    c->broader.insert(ids[(i - 1) / 3]);
    if (i % 4 == 0) c->related.insert(ids[(i * 7) % 20]);
  }
  return b.build(diags);
}

void collect_arks(const json& j, std::set<std::string>& out) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s.rfind("ark:/", 0) == 0) out.insert(s);
  } else if (j.is_structured()) {
    for (const auto& v : j) collect_arks(v, out);
  }
}

service::ServiceConfig write_config(const vocab::testing::TempDir& dir, const ConceptScheme& scheme) {
  vocab::testing::write_file(dir / "scheme.rdf", skos::serialize_skos(scheme));
  service::ServiceConfig c;
  c.listenAddress = "127.0.0.1:0";
  c.resolverHost = "ark.example.edu";
  c.schemes = {dir / "scheme.rdf"};
  c.defaultScheme = scheme.id();
  return c;
}

// 6. Resolver contract over HTTP.
Outcome resolver_contract() {
  Outcome o;
  vocab::testing::TempDir dir;
  auto scheme = resolver_fixture();
  service::Resolver resolver(write_config(dir, scheme));
  service::HttpServer server(resolver);
  httplib::Client c("127.0.0.1", server.start("127.0.0.1", 0));

  auto res = c.Get("/ark:/99152/b47p8tc5z");
  o.require(res && res->status == 200, "published ARK does not resolve");
  if (!o.ok) return o;
  auto j = json::parse(res->body);
  std::set<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
  o.require(keys == std::set<std::string>{"ark", "scheme", "prefLabel", "altLabels", "broader", "narrower",
                                          "related", "source"},
            "concept JSON key set differs");
  o.require(j["ark"] == "ark:/99152/b47p8tc5z", "ark field differs");

  auto brief = c.Get("/ark:/99152/b47p8tc5z?");
  std::vector<std::string> lines;
  {
    std::istringstream in(brief ? brief->body : "");
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  const std::vector<std::string> prefixes = {"who:", "what:", "when:", "where:"};
  o.require(lines.size() == 4, "brief ERC must have four lines");
  for (std::size_t i = 0; o.ok && i < 4; ++i) o.require(lines[i].rfind(prefixes[i], 0) == 0, "ERC line order");
  auto full = c.Get("/ark:/99152/b47p8tc5z??");
  o.require(full && full->status == 200 && full->body.rfind(brief->body, 0) == 0 &&
                full->body.find("erc-support:") != std::string::npos,
            "full inflection lacks the policy block");

  auto missing = c.Get("/ark:/99152/zzzzzzzzz");
  o.require(missing && missing->status == 404 && json::parse(missing->body) == json{{"error", "not found"}},
            "unknown ARK must give 404 {\"error\":\"not found\"}");
  auto hyphen = c.Get("/ark:/99152/b4-7p8-tc5z");
  o.require(hyphen && hyphen->status == 200 && hyphen->body == res->body, "hyphenated form differs");
  auto other_host = c.Get("/ark:/99152/b47p8tc5z", {{"Host", "elsewhere.example:1234"}});
  o.require(other_host && other_host->body == res->body, "body depends on Host header");

  // Crawl from search, index and one concept; every ARK seen must resolve.
  std::set<std::string> seen;
  std::vector<std::string> frontier;
  int bodies = 0;
  auto harvest = [&](const httplib::Result& r) {
    if (!r || r->status != 200) {
      o.require(false, "crawl request failed");
      return;
    }
    ++bodies;
    std::set<std::string> found;
    collect_arks(json::parse(r->body), found);
    for (const auto& a : found) {
      if (seen.insert(a).second) frontier.push_back(a);
    }
  };
  harvest(c.Get("/api/v1/search?q=optics"));
  harvest(c.Post("/api/v1/index", R"({"text":"Optics and aberration."})", "application/json"));
  harvest(res);
  while (!frontier.empty() && o.ok) {
    const std::string a = frontier.back();
    frontier.pop_back();
    auto r = c.Get("/" + a);
    o.require(r && r->status == 200, a + " does not dereference");
    harvest(r);
    auto id = ark::parse(a);
    for (const char* rel : {"broader", "narrower", "related"}) {
      harvest(c.Get("/api/v1/concepts/" + id.naan + "/" + id.name + "/" + rel));
    }
  }
  o.require(seen.size() == 20, "crawl reached " + std::to_string(seen.size()) + " of 20 concepts");
  server.stop();
  return o;
}

// 7. Desk-scale performance.
Outcome desk_scale() {
  Outcome o;
  vocab::testing::TempDir dir;
  std::mt19937 rng(10000);
  auto labels = distinct_labels(rng, 12000, 3);
  SchemeBuilder b({"big", "Generated", 2000, "99152"});
  std::vector<Diagnostic> diags;
  ark::MinterState m;
  std::vector<ArkId> ids;
  for (int i = 0; i < 10000; ++i) {
    auto [id, next] = ark::mint(m);
    m = next;
    Concept c;
    c.id = id;
    c.prefLabel = labels[i];
    if (i % 5 == 0) c.altLabels.insert(labels[10000 + i / 5]);
    if (i > 0) c.broader.insert(ids[rng() % ids.size()]);
    if (i % 3 == 0 && i > 0) c.related.insert(ids[rng() % ids.size()]);
    ids.push_back(id);
    b.add(std::move(c), diags);
  }
  auto scheme = b.build(diags);
  auto config = write_config(dir, scheme);

  auto start = Clock::now();
  service::Resolver resolver(config);
  const double load_s = seconds_since(start);
  o.require(resolver.snapshot()->default_scheme().size() == 10000, "loaded concept count differs");
  o.require(load_s < 5.0, "load took " + std::to_string(load_s) + "s");

  service::HttpServer server(resolver);
  httplib::Client c("127.0.0.1", server.start("127.0.0.1", 0));
  c.set_keep_alive(true);
  std::vector<double> latencies;
  for (int i = 0; i < 1000; ++i) {
    const ArkId& id = ids[rng() % ids.size()];
    auto t0 = Clock::now();
    auto r = c.Get("/" + id.to_string());
    latencies.push_back(seconds_since(t0) * 1000.0);
    if (!r || r->status != 200) {
      o.require(false, "lookup failed for " + id.to_string());
      break;
    }
  }
  server.stop();
  std::sort(latencies.begin(), latencies.end());
  const double p95 = latencies.empty() ? 1e9 : latencies[latencies.size() * 95 / 100];
  o.require(p95 < 50.0, "p95 lookup latency " + std::to_string(p95) + "ms");
  if (o.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "load %.2fs, p95 %.2fms", load_s, p95);
    o.detail = buf;
  }
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  failed += !report(1, "conversion-rule-fidelity", 1, conversion_fidelity);
  failed += !report(2, "skos-round-trip", 10, round_trip);
  failed += !report(3, "ark-integrity", 5, ark_integrity);
  failed += !report(4, "rake-oracle-equivalence", 5, rake_oracle);
  failed += !report(5, "planted-term-retrieval", 1, planted_terms);
  failed += !report(6, "resolver-contract", 5, resolver_contract);
  failed += !report(7, "desk-scale-performance", 0, desk_scale);
  std::printf("%d of 7 criteria passed\n", 7 - failed);
  return failed == 0 ? 0 : 1;
}
