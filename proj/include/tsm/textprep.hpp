#pragma once

// Text preprocessing: tokenization, heuristic entity filtering, stopword
// removal and table-driven lemmatization. Produces the deduplicated word
// sets that every later stage consumes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tsm/error.hpp"

namespace tsm {

struct RawDocument {
  std::string id;
  std::string text;
  std::string category;  // empty when the corpus has no labels
};

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source text
  std::size_t end = 0;
  bool sentence_start = false;
};

namespace detail {

// Decodes one UTF-8 code point starting at s[i]. Returns the code point and
// advances i. Invalid sequences decode as U+FFFD and consume one byte.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Latin letters only: ASCII plus Latin-1 Supplement and Latin Extended.
inline bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  return cp >= 0x1E00 && cp <= 0x1EFF;
}

inline bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

inline bool is_upper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// A separator ends a sentence if it holds '.', '!' or '?' followed by
// whitespace or the end of the separator, or a blank line.
inline bool separator_ends_sentence(std::string_view sep) {
  for (std::size_t i = 0; i < sep.size(); ++i) {
    const char c = sep[i];
    if (c == '.' || c == '!' || c == '?') {
      if (i + 1 == sep.size() || is_space(sep[i + 1]) || sep[i + 1] == '"' ||
          sep[i + 1] == ')' || sep[i + 1] == '\'') {
        return true;
      }
    }
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < sep.size() && (sep[j] == ' ' || sep[j] == '\t' ||
                                sep[j] == '\r')) {
        ++j;
      }
      if (j < sep.size() && sep[j] == '\n') return true;
    }
  }
  return false;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Number of code points in a UTF-8 string.
inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    detail::decode_utf8(s, i);
    ++n;
  }
  return n;
}

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    detail::append_utf8(out, detail::to_lower(detail::decode_utf8(s, i)));
  }
  return out;
}

inline bool is_capitalized(std::string_view word) {
  if (word.empty()) return false;
  std::size_t i = 0;
  return detail::is_upper(detail::decode_utf8(word, i));
}

// Tokens are maximal runs of letters. An apostrophe between two letters is
// kept inside the token (and normalized to ASCII); every other character is
// a separator.
inline std::vector<Token> tokenize_spans(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  std::size_t prev_end = 0;
  while (i < text.size()) {
    std::size_t start = i;
    char32_t cp = detail::decode_utf8(text, i);
    if (!detail::is_letter(cp)) continue;

    Token tok;
    tok.begin = start;
    detail::append_utf8(tok.text, cp);
    std::size_t end = i;
    while (i < text.size()) {
      std::size_t j = i;
      const char32_t next = detail::decode_utf8(text, j);
      if (detail::is_letter(next)) {
        detail::append_utf8(tok.text, next);
        i = j;
        end = j;
        continue;
      }
      if (detail::is_apostrophe(next) && j < text.size()) {
        std::size_t k = j;
        if (detail::is_letter(detail::decode_utf8(text, k))) {
          tok.text.push_back('\'');
          i = j;
          continue;
        }
      }
      break;
    }
    tok.end = end;
    tok.sentence_start =
        tokens.empty() ||
        detail::separator_ends_sentence(text.substr(prev_end, start - prev_end));
    prev_end = end;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_spans(text)) out.push_back(std::move(t.text));
  return out;
}

struct PrepConfig {
  // Empty stopword_path selects the built-in English list; empty
  // lemma_table_path selects an empty table.
  std::filesystem::path stopword_path;
  std::filesystem::path lemma_table_path;
  bool entity_filter = true;
  bool lowercase = true;
};

struct PreparedDocument {
  std::string id;
  std::vector<std::string> words;   // unique, first-occurrence order
  std::vector<std::string> tokens;  // surviving tokens before dedup
  std::size_t dropped_stopwords = 0;
  std::size_t dropped_entities = 0;
};

using StopwordSet = std::unordered_set<std::string>;
using LemmaTable = std::unordered_map<std::string, std::string>;

inline constexpr std::string_view kBuiltinStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "am",
    "an", "and", "any", "are", "aren't", "as", "at", "be", "because", "been",
    "before", "being", "below", "between", "both", "but", "by", "can",
    "cannot", "could", "couldn't", "did", "didn't", "do", "does", "doesn't",
    "doing", "don't", "down", "during", "each", "few", "for", "from",
    "further", "had", "hadn't", "has", "hasn't", "have", "haven't", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his", "how",
    "however", "i", "if", "in", "into", "is", "isn't", "it", "it's", "its",
    "itself", "just", "may", "me", "might", "more", "most", "must", "my",
    "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only",
    "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
    "shall", "she", "should", "shouldn't", "so", "some", "such", "than",
    "that", "the", "their", "theirs", "them", "themselves", "then", "there",
    "these", "they", "this", "those", "through", "thus", "to", "too",
    "under", "until", "up", "upon", "very", "was", "wasn't", "we", "were",
    "weren't", "what", "when", "where", "whether", "which", "while", "who",
    "whom", "why", "will", "with", "within", "without", "would", "you",
    "your", "yours", "yourself", "yourselves"};

inline StopwordSet builtin_stopwords() {
  StopwordSet s;
  for (auto w : kBuiltinStopwords) s.emplace(w);
  return s;
}

inline std::ifstream open_config_file(const std::filesystem::path& path,
                                      std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + std::string(what) + " file: " +
                      path.string());
  }
  return in;
}

inline StopwordSet parse_stopwords(std::istream& in, bool lowercase) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = detail::trim(line);
    if (w.empty() || w.front() == '#') continue;
    if (lowercase) w = to_lower(w);
    words.insert(std::move(w));
  }
  return words;
}

inline StopwordSet load_stopwords(const std::filesystem::path& path,
                                  bool lowercase = true) {
  auto in = open_config_file(path, "stopword");
  return parse_stopwords(in, lowercase);
}

// Parses `surface<TAB>lemma` lines. Chains (a->b, b->c) are resolved to the
// terminal lemma so a second lookup is a no-op; cycles are rejected.
inline LemmaTable parse_lemma_table(std::istream& in, bool lowercase,
                                    const std::string& source = "<stream>") {
  LemmaTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ConfigError("lemma table " + source + ":" + std::to_string(lineno) +
                        ": expected two tab-separated columns");
    }
    std::string surface = detail::trim(std::string_view(line).substr(0, tab));
    std::string lemma = detail::trim(std::string_view(line).substr(tab + 1));
    if (lowercase) {
      surface = to_lower(surface);
      lemma = to_lower(lemma);
    }
    const auto lemma_tokens = tokenize(lemma);
    if (surface.empty() || lemma_tokens.size() != 1 || lemma_tokens[0] != lemma) {
      throw ConfigError("lemma table " + source + ":" + std::to_string(lineno) +
                        ": lemma must be a single word");
    }
    table.try_emplace(std::move(surface), std::move(lemma));
  }

  LemmaTable resolved;
  for (const auto& [surface, lemma] : table) {
    std::string cur = lemma;
    std::unordered_set<std::string> seen{surface};
    for (auto it = table.find(cur); it != table.end() && it->second != cur;
         it = table.find(cur)) {
      if (!seen.insert(cur).second) {
        throw ConfigError("lemma table " + source + ": cycle through '" + cur +
                          "'");
      }
      cur = it->second;
    }
    resolved.emplace(surface, std::move(cur));
  }
  return resolved;
}

inline LemmaTable load_lemma_table(const std::filesystem::path& path,
                                   bool lowercase = true) {
  auto in = open_config_file(path, "lemma table");
  return parse_lemma_table(in, lowercase, path.string());
}

// Loaded preprocessing resources. Immutable once built; prepare() is const
// and safe to call concurrently.
class Preprocessor {
 public:
  Preprocessor() : stopwords_(builtin_stopwords()) {}

  explicit Preprocessor(const PrepConfig& cfg)
      : entity_filter_(cfg.entity_filter), lowercase_(cfg.lowercase) {
    stopwords_ = cfg.stopword_path.empty()
                     ? builtin_stopwords()
                     : load_stopwords(cfg.stopword_path, cfg.lowercase);
    if (!cfg.lemma_table_path.empty()) {
      lemmas_ = load_lemma_table(cfg.lemma_table_path, cfg.lowercase);
    }
  }

  Preprocessor(StopwordSet stopwords, LemmaTable lemmas,
               bool entity_filter = true, bool lowercase = true)
      : stopwords_(std::move(stopwords)),
        lemmas_(std::move(lemmas)),
        entity_filter_(entity_filter),
        lowercase_(lowercase) {}

  const StopwordSet& stopwords() const { return stopwords_; }
  const LemmaTable& lemmas() const { return lemmas_; }
  bool entity_filter() const { return entity_filter_; }
  bool lowercase() const { return lowercase_; }

  bool is_stopword(std::string_view word) const {
    return stopwords_.contains(lowercase_ ? to_lower(word) : std::string(word));
  }

  // tokenize -> drop <2 chars -> entity filter -> lowercase -> stopwords ->
  // lemma lookup -> dedup (first occurrence wins).
  PreparedDocument prepare(const RawDocument& doc) const {
    PreparedDocument out;
    out.id = doc.id;

    std::vector<Token> tokens;
    for (auto& t : tokenize_spans(doc.text)) {
      if (utf8_length(t.text) >= 2) tokens.push_back(std::move(t));
    }

    std::vector<bool> entity(tokens.size(), false);
    if (entity_filter_) {
      // Runs of two or more adjacent capitalized tokens within a sentence.
      std::size_t i = 0;
      while (i < tokens.size()) {
        if (!is_capitalized(tokens[i].text)) {
          ++i;
          continue;
        }
        std::size_t j = i + 1;
        while (j < tokens.size() && !tokens[j].sentence_start &&
               is_capitalized(tokens[j].text)) {
          ++j;
        }
        if (j - i >= 2) {
          for (std::size_t k = i; k < j; ++k) entity[k] = true;
        } else if (!tokens[i].sentence_start) {
          entity[i] = true;
        }
        i = j;
      }
    }

    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (entity[i]) {
        ++out.dropped_entities;
        continue;
      }
      std::string w = lowercase_ ? to_lower(tokens[i].text) : tokens[i].text;
      if (stopwords_.contains(w)) {
        ++out.dropped_stopwords;
        continue;
      }
      if (auto it = lemmas_.find(w); it != lemmas_.end()) {
        w = it->second;
        // A lemma may itself be a stopword ("having" -> "have").
        if (stopwords_.contains(w)) {
          ++out.dropped_stopwords;
          continue;
        }
        if (utf8_length(w) < 2) continue;
      }
      out.tokens.push_back(w);
      if (seen.insert(w).second) out.words.push_back(std::move(w));
    }
    return out;
  }

 private:
  StopwordSet stopwords_;
  LemmaTable lemmas_;
  bool entity_filter_ = true;
  bool lowercase_ = true;
};

inline PreparedDocument preprocess(const RawDocument& doc,
                                   const Preprocessor& prep) {
  return prep.prepare(doc);
}

inline std::vector<PreparedDocument> preprocess_all(
    const std::vector<RawDocument>& docs, const Preprocessor& prep) {
  std::vector<PreparedDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(prep.prepare(d));
  return out;
}

}  // namespace tsm
