#pragma once

// Desk-scale honeyfile generation from a template document: Lorem Ipsum
// replacement, and word substitution that keeps each word's coarse class.
// Separators (whitespace, punctuation, digits) are copied verbatim, so the
// output keeps the template's token count and layout.

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/error.hpp"
#include "tsm/rng.hpp"
#include "tsm/textprep.hpp"

namespace tsm {

enum class GenMode { Lorem, Substitution };

inline std::string_view mode_name(GenMode m) {
  return m == GenMode::Lorem ? "lorem" : "substitution";
}

struct GenConfig {
  GenMode mode = GenMode::Lorem;
  RawDocument template_doc;
  std::vector<RawDocument> source_corpus;  // substitution mode only
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kLoremIpsum[] = {
    "lorem", "ipsum", "dolor", "sit", "amet", "consectetur", "adipiscing",
    "elit", "sed", "do", "eiusmod", "tempor", "incididunt", "ut", "labore",
    "et", "dolore", "magna", "aliqua", "ut", "enim", "ad", "minim", "veniam",
    "quis", "nostrud", "exercitation", "ullamco", "laboris", "nisi", "ut",
    "aliquip", "ex", "ea", "commodo", "consequat", "duis", "aute", "irure",
    "dolor", "in", "reprehenderit", "in", "voluptate", "velit", "esse",
    "cillum", "dolore", "eu", "fugiat", "nulla", "pariatur", "excepteur",
    "sint", "occaecat", "cupidatat", "non", "proident", "sunt", "in", "culpa",
    "qui", "officia", "deserunt", "mollit", "anim", "id", "est", "laborum"};

namespace detail {

// Rebuilds `text` with the i-th token replaced by replacement(i, token).
template <typename Fn>
std::string replace_tokens(std::string_view text, Fn&& replacement) {
  const auto tokens = tokenize_spans(text);
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.append(text.substr(pos, tokens[i].begin - pos));
    out.append(replacement(i, tokens[i]));
    pos = tokens[i].end;
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace detail

inline RawDocument generate_lorem(const GenConfig& cfg) {
  constexpr std::size_t n = std::size(kLoremIpsum);
  RawDocument out;
  out.id = cfg.template_doc.id + "-lorem";
  out.category = cfg.template_doc.category;
  out.text = detail::replace_tokens(cfg.template_doc.text, [](std::size_t i, const Token&) {
    return std::string(kLoremIpsum[i % n]);
  });
  return out;
}

// Coarse word class used in place of a part-of-speech tag.
enum class WordClass { Stopword, Capitalized, Ing, Ed, Ly, Tion, Plural, Other };

inline constexpr std::size_t kWordClassCount = 8;

inline WordClass classify_word(std::string_view word, const StopwordSet& stopwords) {
  const std::string lower = to_lower(word);
  if (stopwords.contains(lower)) return WordClass::Stopword;
  if (is_capitalized(word)) return WordClass::Capitalized;
  auto ends = [&](std::string_view suffix) {
    return lower.size() > suffix.size() &&
           std::string_view(lower).substr(lower.size() - suffix.size()) == suffix;
  };
  if (ends("ing")) return WordClass::Ing;
  if (ends("ed")) return WordClass::Ed;
  if (ends("ly")) return WordClass::Ly;
  if (ends("tion") || ends("sion")) return WordClass::Tion;
  if (ends("s")) return WordClass::Plural;
  return WordClass::Other;
}

// Replaces every non-stopword template token with a seeded uniform draw
// from the source-corpus words of the same class. Empty classes fall back
// to "other", then to every content word.
inline RawDocument generate_substitution(const GenConfig& cfg,
                                         const StopwordSet& stopwords) {
  if (cfg.source_corpus.empty()) {
    throw GenerationError("substitution: source corpus is empty");
  }
  std::array<std::set<std::string>, kWordClassCount> buckets;
  std::set<std::string> all_content;
  for (const auto& doc : cfg.source_corpus) {
    for (auto& tok : tokenize(doc.text)) {
      if (utf8_length(tok) < 2) continue;
      const WordClass c = classify_word(tok, stopwords);
      if (c == WordClass::Stopword) continue;
      all_content.insert(tok);
      buckets[static_cast<std::size_t>(c)].insert(std::move(tok));
    }
  }
  if (all_content.empty()) {
    throw GenerationError("substitution: source corpus has no content words");
  }
  std::array<std::vector<std::string>, kWordClassCount> pools;
  for (std::size_t c = 0; c < kWordClassCount; ++c) {
    pools[c].assign(buckets[c].begin(), buckets[c].end());
  }
  const std::vector<std::string> fallback(all_content.begin(), all_content.end());

  Rng rng(cfg.seed);
  RawDocument out;
  out.id = cfg.template_doc.id + "-subst";
  out.category = cfg.template_doc.category;
  out.text = detail::replace_tokens(
      cfg.template_doc.text, [&](std::size_t, const Token& tok) -> std::string {
        const WordClass c = classify_word(tok.text, stopwords);
        if (c == WordClass::Stopword) return tok.text;
        const std::vector<std::string>* pool = &pools[static_cast<std::size_t>(c)];
        if (pool->empty()) pool = &pools[static_cast<std::size_t>(WordClass::Other)];
        if (pool->empty()) pool = &fallback;
        return (*pool)[rng.below(pool->size())];
      });
  return out;
}

inline RawDocument generate(const GenConfig& cfg, const StopwordSet& stopwords) {
  return cfg.mode == GenMode::Lorem ? generate_lorem(cfg)
                                    : generate_substitution(cfg, stopwords);
}

}  // namespace tsm
