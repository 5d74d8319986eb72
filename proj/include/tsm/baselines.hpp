#pragma once

// Comparison measures: exact common-word counting, and a mean-word-vector
// document similarity. The latter stands in for a trained paragraph-vector
// model and is labelled "mean-vector" everywhere.

#include <Eigen/Core>

#include <algorithm>
#include <iterator>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tsm/embedding.hpp"
#include "tsm/error.hpp"
#include "tsm/textprep.hpp"

namespace tsm {

struct BaselineScore {
  double value = 0.0;
  std::string kind;                  // "common-words" | "mean-vector"
  std::vector<std::string> matched;  // common-words only, sorted
};

inline BaselineScore common_word_count(const PreparedDocument& honeyfile,
                                       std::span<const PreparedDocument> context,
                                       bool normalized) {
  if (context.empty()) throw InputError("common-words: empty local context");
  std::set<std::string> context_words;
  for (const auto& d : context) context_words.insert(d.words.begin(), d.words.end());
  const std::set<std::string> h(honeyfile.words.begin(), honeyfile.words.end());

  BaselineScore out;
  out.kind = "common-words";
  std::set_intersection(h.begin(), h.end(), context_words.begin(),
                        context_words.end(), std::back_inserter(out.matched));
  out.value = static_cast<double>(out.matched.size());
  if (normalized) {
    if (h.empty()) {
      throw ScoringError("common-words: honeyfile has no words to normalize by");
    }
    out.value /= static_cast<double>(h.size());
  }
  return out;
}

namespace detail {

inline Eigen::RowVectorXd mean_unit_vector(std::span<const std::string> words,
                                           const EmbeddingTable& table,
                                           const char* side) {
  const auto set = embed_set(words, table);
  if (set.empty()) {
    throw ScoringError(std::string("mean-vector: no embeddable words in the ") + side);
  }
  return set.matrix.colwise().mean();
}

}  // namespace detail

// Rescaled cosine between the mean unit vector of the honeyfile words and
// that of the concatenated context word lists.
inline BaselineScore mean_vector_similarity(const PreparedDocument& honeyfile,
                                            std::span<const PreparedDocument> context,
                                            const EmbeddingTable& table) {
  if (context.empty()) throw InputError("mean-vector: empty local context");
  std::vector<std::string> concatenated;
  for (const auto& d : context) {
    concatenated.insert(concatenated.end(), d.words.begin(), d.words.end());
  }
  const Eigen::RowVectorXd h = detail::mean_unit_vector(honeyfile.words, table, "honeyfile");
  const Eigen::RowVectorXd c = detail::mean_unit_vector(concatenated, table, "context");
  BaselineScore out;
  out.kind = "mean-vector";
  try {
    out.value = normalized_similarity({h.data(), static_cast<std::size_t>(h.size())},
                                      {c.data(), static_cast<std::size_t>(c.size())});
  } catch (const DomainError&) {
    throw ScoringError("mean-vector: a mean vector is zero");
  }
  return out;
}

}  // namespace tsm
