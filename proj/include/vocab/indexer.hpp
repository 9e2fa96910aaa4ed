#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "vocab/model.hpp"

namespace vocab::index {

/// Exact non-negative fraction; RAKE scores are sums of deg/freq ratios.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& other) const;
  Rational& operator+=(const Rational& other) { return *this = *this + other; }
  bool operator==(const Rational& other) const = default;
  std::strong_ordering operator<=>(const Rational& other) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

using Stoplist = std::unordered_set<std::string>;

/// The bundled general English stoplist.
std::shared_ptr<const Stoplist> bundled_stoplist();
/// One word per line, '#' starts a comment; words are case-folded.
Stoplist parse_stoplist(std::string_view contents);
Stoplist load_stoplist(const std::filesystem::path& path);

struct RakeParams {
  int minCharLength = 3;
  int maxWordsPerPhrase = 4;
  int minKeywordFrequency = 1;
  std::shared_ptr<const Stoplist> stoplist = bundled_stoplist();

  /// Throws Error when a bound is below 1 or the stoplist is empty.
  void validate() const;
};

struct WordStats {
  std::string word;
  std::int64_t freq = 0;
  std::int64_t deg = 0;
  Rational score() const { return Rational(deg, freq); }
};

struct ScoredPhrase {
  std::vector<std::string> words;
  std::string text;
  Rational score;
  int occurrences = 0;
};

enum class InputFormat { Txt, Html };

/// Plain text for indexing. Html input loses tags, scripts, styles and
/// comments, has entities decoded and whitespace collapsed (runs that
/// contain a line break become one newline). Throws InvalidEncoding.
std::string extract_text(std::string_view input, InputFormat format);

/// Candidate phrase occurrences in document order: word runs between
/// sentence breaks, punctuation, stopwords, short and numeric tokens.
/// Phrases longer than maxWordsPerPhrase are already removed.
std::vector<std::vector<std::string>> candidate_phrases(std::string_view text,
                                                        const RakeParams& params);

/// Keyphrases by descending score, ties broken by text.
std::vector<ScoredPhrase> rake_extract(std::string_view text, const RakeParams& params = {});

struct IndexResult {
  ArkId conceptId;
  std::string matchedLabel;
  LabelKind labelKind = LabelKind::Pref;
  double score = 0;
  std::string prefLabel;
  bool operator==(const IndexResult&) const = default;
};

/// Exact lookup of every phrase in the scheme's label index. With
/// `uninvert`, "A, B" labels also match the phrase "b a". One result per
/// concept with its best phrase score.
std::vector<IndexResult> match_vocabulary(const std::vector<ScoredPhrase>& phrases,
                                          const ConceptScheme& scheme, bool uninvert);

nlohmann::ordered_json to_json(const IndexResult& result);
IndexResult result_from_json(const nlohmann::json& j);
std::vector<IndexResult> results_from_json(std::string_view document);

enum class CloudFormat { Json, Html };

/// Size class 1..5 per result, linear in score between min and max; all
/// equal scores map to 3.
std::vector<int> size_classes(const std::vector<IndexResult>& results);

/// Throws EmptyResults for an empty html cloud.
std::string tag_cloud(const std::vector<IndexResult>& results, CloudFormat format);

}  // namespace vocab::index
