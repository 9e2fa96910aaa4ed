#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vocab/model.hpp"
#include "vocab/tei.hpp"

namespace vocab::testing {

/// Distinct lowercase pseudo-words of at least five letters, none of them
/// in the bundled stoplist.
const std::vector<std::string>& word_pool();

/// Capitalised multi-word label built from the pool, e.g. "Varumel Tosiban".
std::string make_label(std::mt19937& rng, int words);

/// Random valid scheme with up to `max_concepts` concepts, random altLabels,
/// links and provenance.
ConceptScheme random_scheme(std::mt19937& rng, int max_concepts, const std::string& scheme_id = "test");

/// Scheme from (prefLabel, altLabels) pairs with ids minted in order.
ConceptScheme scheme_from_labels(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& labels,
    const std::string& scheme_id = "test", int year = 1910);

/// TEI-subset document for the given entries (pb elements emitted when the
/// page changes).
std::string tei_document(const std::vector<tei::VocabEntry>& entries);

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& data);
std::string read_file(const std::filesystem::path& path);

}  // namespace vocab::testing
