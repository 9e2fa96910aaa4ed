#include "support/fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "vocab/indexer.hpp"
#include "vocab/text.hpp"
#include "vocab/xml.hpp"

namespace vocab::testing {

const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = [] {
    const char* onsets[] = {"b", "d", "f", "g", "k", "m", "n", "p", "r", "s", "t", "v", "z"};
    const char* vowels[] = {"a", "e", "i", "o", "u"};
    const char* codas[] = {"l", "n", "r", "s", "x"};
    auto stop = index::bundled_stoplist();
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const char* o1 : onsets) {
      for (const char* v1 : vowels) {
        for (const char* o2 : onsets) {
          for (const char* v2 : vowels) {
            for (const char* c : codas) {
              std::string w = std::string(o1) + v1 + o2 + v2 + c;
              if (stop->count(w) == 0 && seen.insert(w).second) out.push_back(w);
            }
          }
        }
      }
    }
    // Deterministic shuffle so neighbouring words differ in every letter.
    std::mt19937 rng(7);
    std::shuffle(out.begin(), out.end(), rng);
    return out;
  }();
  return pool;
}

std::string make_label(std::mt19937& rng, int words) {
  const auto& pool = word_pool();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::string out;
  for (int i = 0; i < words; ++i) {
    std::string w = pool[pick(rng)];
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

ConceptScheme random_scheme(std::mt19937& rng, int max_concepts, const std::string& scheme_id) {
  std::uniform_int_distribution<int> count_dist(1, max_concepts);
  const int n = count_dist(rng);
  SchemeBuilder builder({scheme_id, "Random scheme <" + scheme_id + "> & \"co\"", 1850 + n, "99152"});
  std::vector<Diagnostic> diags;
  ark::MinterState minter{"99152", "b4", 6, static_cast<std::uint64_t>(rng() % 1000)};
  std::vector<ArkId> ids;
  std::set<std::string> used;
  std::uniform_int_distribution<int> words(1, 3);
  std::uniform_int_distribution<int> small(0, 2);
  while (static_cast<int>(ids.size()) < n) {
    std::string label = make_label(rng, words(rng));
    if (!used.insert(text::normalize_label(label)).second) continue;
    Concept c;
    auto [id, next] = ark::mint(minter);
    minter = next;
    c.id = id;
    c.prefLabel = label;
    for (int k = small(rng); k > 0; --k) {
      std::string alt = make_label(rng, words(rng));
      if (rng() % 7 == 0) alt += ", " + make_label(rng, 1);
      if (rng() % 11 == 0) alt += " & <sons>";
      if (used.insert(text::normalize_label(alt)).second) c.altLabels.insert(alt);
    }
    switch (rng() % 4) {
      case 0: break;
      case 1: c.source = SourceRef{static_cast<int>(rng() % 900) + 1, std::nullopt}; break;
      case 2: c.source = SourceRef{std::nullopt, "e" + std::to_string(rng() % 10000)}; break;
      default: c.source = SourceRef{static_cast<int>(rng() % 900) + 1, "e" + std::to_string(ids.size())};
    }
    ids.push_back(c.id);
    builder.add(std::move(c), diags);
  }
  std::uniform_int_distribution<std::size_t> any(0, ids.size() - 1);
  for (const auto& id : ids) {
    Concept* c = builder.find(id);
    for (int k = small(rng); k > 0; --k) {
      const ArkId& target = ids[any(rng)];
      if (target == id) continue;
      switch (rng() % 3) {
        case 0: c->broader.insert(target); break;
        case 1: c->narrower.insert(target); break;
        default: c->related.insert(target);
      }
    }
  }
  return builder.build(diags);
}

ConceptScheme scheme_from_labels(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& labels,
    const std::string& scheme_id, int year) {
  SchemeBuilder builder({scheme_id, "Fixture " + scheme_id, year, "99152"});
  std::vector<Diagnostic> diags;
  ark::MinterState minter;
  for (const auto& [pref, alts] : labels) {
    auto [id, next] = ark::mint(minter);
    minter = next;
    Concept c;
    c.id = id;
    c.prefLabel = pref;
    c.altLabels.insert(alts.begin(), alts.end());
    builder.add(std::move(c), diags);
  }
  return builder.build(diags);
}

std::string tei_document(const std::vector<tei::VocabEntry>& entries) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<TEI xmlns=\"http://www.tei-c.org/ns/1.0\">\n<text>\n<body>\n";
  std::optional<int> page;
  for (const auto& e : entries) {
    if (e.page && e.page != page) {
      out << "<pb n=\"" << *e.page << "\"/>\n";
      page = e.page;
    }
    out << "<entry";
    if (!e.entryId.empty()) out << " xml:id=\"" << xml::escape(e.entryId, true) << "\"";
    out << ">\n  <form><term>" << xml::escape(e.headword) << "</term></form>\n";
    for (const auto& r : e.refs) {
      out << "  <xr type=\"" << tei::to_string(r.kind) << "\"><term>" << xml::escape(r.target)
          << "</term></xr>\n";
    }
    out << "</entry>\n";
  }
  out << "</body>\n</text>\n</TEI>\n";
  return out.str();
}

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "vocabpipe-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace vocab::testing
