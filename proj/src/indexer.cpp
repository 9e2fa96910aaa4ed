#include "vocab/indexer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "vocab/text.hpp"
#include "vocab/xml.hpp"

namespace vocab::detail {
extern const char* const kBundledStoplist;
}

namespace vocab::index {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::operator+(const Rational& other) const {
  std::int64_t g = std::gcd(den_, other.den_);
  std::int64_t lcm = den_ / g * other.den_;
  return Rational(num_ * (lcm / den_) + other.num_ * (lcm / other.den_), lcm);
}

std::strong_ordering Rational::operator<=>(const Rational& other) const {
  auto lhs = static_cast<__int128>(num_) * other.den_;
  auto rhs = static_cast<__int128>(other.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Stoplist parse_stoplist(std::string_view contents) {
  Stoplist words;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string word = text::fold_case(text::collapse_whitespace(line));
    if (!word.empty()) words.insert(std::move(word));
  }
  return words;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read stoplist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!text::is_valid_utf8(buf.str())) throw InvalidEncoding("stoplist is not valid UTF-8");
  return parse_stoplist(buf.str());
}

std::shared_ptr<const Stoplist> bundled_stoplist() {
  static const auto words = std::make_shared<const Stoplist>(parse_stoplist(detail::kBundledStoplist));
  return words;
}

void RakeParams::validate() const {
  if (minCharLength < 1 || maxWordsPerPhrase < 1 || minKeywordFrequency < 1) {
    throw Error("RAKE parameters must all be at least 1");
  }
  if (!stoplist || stoplist->empty()) throw Error("RAKE stoplist must not be empty");
}

// ---------------------------------------------------------------------------
// Plain-text extraction

namespace {

bool ieq(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (ieq(hay.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

std::optional<char32_t> named_entity(std::string_view name) {
  static const std::map<std::string_view, char32_t> kEntities = {
      {"amp", '&'},     {"lt", '<'},      {"gt", '>'},      {"quot", '"'},    {"apos", '\''},
      {"nbsp", 0xA0},   {"ndash", 0x2013}, {"mdash", 0x2014}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
      {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"hellip", 0x2026}, {"copy", 0xA9},  {"eacute", 0xE9},
      {"egrave", 0xE8}, {"aacute", 0xE1}, {"agrave", 0xE0}, {"uuml", 0xFC},   {"ouml", 0xF6},
      {"auml", 0xE4},   {"ccedil", 0xE7}, {"szlig", 0xDF}};
  auto it = kEntities.find(name);
  if (it == kEntities.end()) return std::nullopt;
  return it->second;
}

// Decodes the entity starting at html[pos] == '&'. Returns the number of
// bytes consumed, 0 when the text is not a recognised entity.
std::size_t decode_entity(std::string_view html, std::size_t pos, std::string& out) {
  auto semi = html.find(';', pos);
  if (semi == std::string_view::npos || semi - pos > 10) return 0;
  std::string_view body = html.substr(pos + 1, semi - pos - 1);
  char32_t cp = 0;
  if (!body.empty() && body[0] == '#') {
    bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
    std::string_view digits = body.substr(hex ? 2 : 1);
    if (digits.empty()) return 0;
    for (char c : digits) {
      int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
              : hex && std::isxdigit(static_cast<unsigned char>(c))
                  ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                  : -1;
      if (d < 0) return 0;
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
      if (cp > 0x10FFFF) return 0;
    }
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  } else if (auto named = named_entity(body)) {
    cp = *named;
  } else {
    return 0;
  }
  text::append_utf8(out, cp);
  return semi - pos + 1;
}

bool is_block_tag(std::string_view name) {
  static const std::unordered_set<std::string> kBlocks = {
      "p",     "div",   "br",     "li",      "ul",   "ol",     "h1",      "h2",
      "h3",    "h4",    "h5",     "h6",      "tr",   "td",     "th",      "table",
      "title", "section", "article", "header", "footer", "blockquote", "pre", "hr",
      "dd",    "dt",    "dl",     "nav",     "aside", "caption", "body",   "head"};
  return kBlocks.count(text::fold_case(name)) != 0;
}

// Collapses whitespace; a run containing a line break becomes "\n".
std::string collapse_keep_lines(std::string_view s) {
  std::string out;
  bool in_space = false;
  bool saw_newline = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    char32_t cp = text::next_code_point(s, pos);
    if (text::is_space(cp)) {
      in_space = true;
      saw_newline = saw_newline || cp == '\n' || cp == '\r';
      continue;
    }
    if (in_space && !out.empty()) out.push_back(saw_newline ? '\n' : ' ');
    in_space = saw_newline = false;
    out.append(s.substr(start, pos - start));
  }
  return out;
}

std::string strip_html(std::string_view html) {
  std::string out;
  std::size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c == '&') {
      if (std::size_t used = decode_entity(html, i, out)) {
        i += used;
      } else {
        out.push_back(c);
        ++i;
      }
      continue;
    }
    if (c != '<') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    auto close = html.find('>', i + 1);
    if (close == std::string_view::npos) break;  // unterminated tag: drop the rest
    std::string_view tag = html.substr(i + 1, close - i - 1);
    std::size_t name_start = (!tag.empty() && tag[0] == '/') ? 1 : 0;
    std::size_t name_end = name_start;
    while (name_end < tag.size() && (std::isalnum(static_cast<unsigned char>(tag[name_end])))) ++name_end;
    std::string_view name = tag.substr(name_start, name_end - name_start);
    i = close + 1;
    if (name_start == 0 && (ieq(name, "script") || ieq(name, "style"))) {
      std::string closing = "</" + std::string(name);
      auto end = ifind(html, closing, i);
      if (end == std::string_view::npos) {
        i = html.size();
      } else {
        auto gt = html.find('>', end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      out.push_back(' ');
      continue;
    }
    if (is_block_tag(name)) out.push_back('\n');
  }
  return collapse_keep_lines(out);
}

}  // namespace

std::string extract_text(std::string_view input, InputFormat format) {
  if (!text::is_valid_utf8(input)) throw InvalidEncoding("input is not valid UTF-8");
  if (format == InputFormat::Txt) return std::string(input);
  return strip_html(input);
}

// ---------------------------------------------------------------------------
// RAKE

namespace {

enum class CharClass { Word, Space, Break, Joiner };

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    if (std::isalnum(static_cast<int>(cp))) return CharClass::Word;
    if (cp == '\'' || cp == '-') return CharClass::Joiner;
    if (cp == ' ' || cp == '\t' || cp == '\f' || cp == '\v') return CharClass::Space;
    return CharClass::Break;  // sentence delimiters, line breaks and other punctuation
  }
  if (cp == 0xA0) return CharClass::Space;
  if (cp == 0x2019) return CharClass::Joiner;
  if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7) return CharClass::Break;
  if ((cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F)) return CharClass::Break;
  return CharClass::Word;
}

struct Token {
  std::string word;  // empty for a phrase break
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::string current;
  std::string pending_joiner;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back({text::fold_case(current)});
    current.clear();
    pending_joiner.clear();
  };
  auto brk = [&] {
    flush();
    if (!tokens.empty() && !tokens.back().word.empty()) tokens.push_back({});
  };

  std::size_t pos = 0;
  while (pos < s.size()) {
    char32_t cp = text::next_code_point(s, pos);
    switch (classify(cp)) {
      case CharClass::Word:
        if (!pending_joiner.empty()) {
          current += pending_joiner;
          pending_joiner.clear();
        }
        text::append_utf8(current, cp);
        break;
      case CharClass::Joiner:
        if (current.empty() || !pending_joiner.empty()) {
          brk();
        } else {
          pending_joiner = cp == 0x2019 ? "'" : std::string(1, static_cast<char>(cp));
        }
        break;
      case CharClass::Space:
        if (!pending_joiner.empty()) {
          brk();  // "word- next": trailing joiner acts as punctuation
        } else {
          flush();
        }
        break;
      case CharClass::Break:
        brk();
        break;
    }
  }
  if (!pending_joiner.empty()) {
    brk();
  } else {
    flush();
  }
  return tokens;
}

std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    text::next_code_point(s, pos);
    ++n;
  }
  return n;
}

bool is_numeric(std::string_view w) {
  return std::none_of(w.begin(), w.end(), [](unsigned char c) {
    return std::isalpha(c) || c >= 0x80;
  });
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> candidate_phrases(std::string_view text,
                                                        const RakeParams& params) {
  params.validate();
  std::vector<std::vector<std::string>> phrases;
  std::vector<std::string> current;
  auto close = [&] {
    if (!current.empty() && current.size() <= static_cast<std::size_t>(params.maxWordsPerPhrase)) {
      phrases.push_back(std::move(current));
    }
    current.clear();
  };
  for (auto& token : tokenize(text)) {
    const bool delimiter =
        token.word.empty() || params.stoplist->count(token.word) != 0 ||
        code_points(token.word) < static_cast<std::size_t>(params.minCharLength) ||
        is_numeric(token.word);
    if (delimiter) {
      close();
    } else {
      current.push_back(std::move(token.word));
    }
  }
  close();
  return phrases;
}

std::vector<ScoredPhrase> rake_extract(std::string_view text, const RakeParams& params) {
  const auto occurrences = candidate_phrases(text, params);

  std::map<std::string, WordStats> stats;
  for (const auto& phrase : occurrences) {
    for (const auto& word : phrase) {
      auto& s = stats[word];
      s.word = word;
      s.freq += 1;
      s.deg += static_cast<std::int64_t>(phrase.size());
    }
  }

  std::map<std::string, ScoredPhrase> unique;
  for (const auto& phrase : occurrences) {
    std::string key = join(phrase);
    auto [it, fresh] = unique.try_emplace(key);
    if (fresh) {
      it->second.words = phrase;
      it->second.text = key;
      for (const auto& word : phrase) it->second.score += stats.at(word).score();
    }
    it->second.occurrences += 1;
  }

  std::vector<ScoredPhrase> out;
  for (auto& [key, phrase] : unique) {
    if (phrase.occurrences >= params.minKeywordFrequency) out.push_back(std::move(phrase));
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredPhrase& a, const ScoredPhrase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary matching

namespace {

std::vector<LabelHit> authorized_hits(std::span<const LabelHit> hits) {
  for (const auto& hit : hits) {
    if (hit.kind == LabelKind::Pref) return {hit};
  }
  return {hits.begin(), hits.end()};
}

std::string matched_label(const Concept& c, const LabelHit& hit, const std::string& norm,
                          bool inverted) {
  if (hit.kind == LabelKind::Pref) return c.prefLabel;
  for (const auto& alt : c.altLabels) {
    const std::string key = inverted ? text::uninvert_label(alt) : text::normalize_label(alt);
    if (key == norm) return alt;
  }
  return *c.altLabels.begin();
}

}  // namespace

std::vector<IndexResult> match_vocabulary(const std::vector<ScoredPhrase>& phrases,
                                          const ConceptScheme& scheme, bool uninvert) {
  std::map<ArkId, IndexResult> best;
  auto consider = [&](const ScoredPhrase& phrase, std::span<const LabelHit> hits,
                      const std::string& norm, bool inverted) {
    for (const auto& hit : authorized_hits(hits)) {
      const Concept* c = get_concept(scheme, hit.id);
      if (c == nullptr) continue;
      IndexResult r{c->id, matched_label(*c, hit, norm, inverted), hit.kind, phrase.score.value(),
                    c->prefLabel};
      auto [it, fresh] = best.try_emplace(c->id, r);
      if (!fresh && (r.score > it->second.score ||
                     (r.score == it->second.score && r.labelKind == LabelKind::Pref &&
                      it->second.labelKind == LabelKind::Alt))) {
        it->second = std::move(r);
      }
    }
  };
  for (const auto& phrase : phrases) {
    const std::string norm = text::normalize_label(phrase.text);
    consider(phrase, scheme.label_hits(norm), norm, false);
    if (uninvert) consider(phrase, scheme.uninverted_hits(norm), norm, true);
  }

  std::vector<IndexResult> out;
  out.reserve(best.size());
  for (auto& [id, r] : best) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const IndexResult& a, const IndexResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.prefLabel < b.prefLabel;
  });
  return out;
}

nlohmann::ordered_json to_json(const IndexResult& r) {
  return {{"ark", r.conceptId.base().to_string()},
          {"prefLabel", r.prefLabel},
          {"matchedLabel", r.matchedLabel},
          {"labelKind", std::string(to_string(r.labelKind))},
          {"score", r.score}};
}

IndexResult result_from_json(const nlohmann::json& j) {
  try {
    IndexResult r;
    r.conceptId = ark::parse_normalized(j.at("ark").get<std::string>());
    r.prefLabel = j.at("prefLabel").get<std::string>();
    r.matchedLabel = j.at("matchedLabel").get<std::string>();
    const auto kind = j.at("labelKind").get<std::string>();
    if (kind != "pref" && kind != "alt") throw Error("labelKind must be 'pref' or 'alt'");
    r.labelKind = kind == "pref" ? LabelKind::Pref : LabelKind::Alt;
    r.score = j.at("score").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid index result: ") + e.what());
  }
}

std::vector<IndexResult> results_from_json(std::string_view document) {
  auto j = nlohmann::json::parse(document, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw Error("index results must be a JSON array");
  std::vector<IndexResult> out;
  for (const auto& el : j) out.push_back(result_from_json(el));
  return out;
}

std::vector<int> size_classes(const std::vector<IndexResult>& results) {
  std::vector<int> classes;
  if (results.empty()) return classes;
  auto [lo, hi] = std::minmax_element(results.begin(), results.end(),
                                      [](const auto& a, const auto& b) { return a.score < b.score; });
  const double min = lo->score;
  const double max = hi->score;
  for (const auto& r : results) {
    if (max == min) {
      classes.push_back(3);
    } else {
      classes.push_back(1 + static_cast<int>(std::floor((r.score - min) / (max - min) * 4.0 + 0.5)));
    }
  }
  return classes;
}

std::string tag_cloud(const std::vector<IndexResult>& results, CloudFormat format) {
  if (format == CloudFormat::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
  }
  if (results.empty()) throw EmptyResults("tag cloud needs at least one result");
  const auto classes = size_classes(results);
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Subject tags</title>\n"
      << "<style>\n"
      << ".tag-cloud { line-height: 2; }\n"
      << ".tag { margin: 0 0.4em; }\n"
      << ".size-1 { font-size: 0.8em; }\n"
      << ".size-2 { font-size: 1.1em; }\n"
      << ".size-3 { font-size: 1.5em; }\n"
      << ".size-4 { font-size: 2em; }\n"
      << ".size-5 { font-size: 2.6em; }\n"
      << "</style>\n</head>\n<body>\n<div class=\"tag-cloud\">\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::ostringstream score;
    score << r.score;
    out << "<span class=\"tag size-" << classes[i] << "\" data-ark=\""
        << xml::escape(r.conceptId.base().to_string(), true) << "\" title=\"score "
        << score.str() << "\">" << xml::escape(r.prefLabel) << "</span>\n";
  }
  out << "</div>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace vocab::index
