#pragma once

// TSM enticement score: similarity of every honeyfile word to every topic
// word of the local context, aggregated into one value in [0,1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsm/embedding.hpp"
#include "tsm/error.hpp"
#include "tsm/textprep.hpp"
#include "tsm/topics.hpp"

namespace tsm {

struct Average {};

// Entries >= delta are summed; the sum is divided by the full pair count.
struct Threshold {
  double delta = 0.9;
};

// The ceil(p * N) largest entries are summed; the sum is divided by N.
struct TopFraction {
  double p = 0.005;
};

using AggregationPolicy = std::variant<Average, Threshold, TopFraction>;

inline void validate(const AggregationPolicy& policy) {
  if (const auto* t = std::get_if<Threshold>(&policy)) {
    if (!(t->delta >= 0.0 && t->delta <= 1.0)) {
      throw ConfigError("threshold delta must be in [0,1]");
    }
  } else if (const auto* f = std::get_if<TopFraction>(&policy)) {
    if (!(f->p > 0.0 && f->p <= 1.0)) {
      throw ConfigError("top fraction must be in (0,1]");
    }
  }
}

inline std::string policy_name(const AggregationPolicy& policy) {
  switch (policy.index()) {
    case 0: return "average";
    case 1: return "threshold";
    default: return "topfrac";
  }
}

// "average", "threshold(0.9)", "topfrac(0.005)".
inline std::string describe(const AggregationPolicy& policy) {
  if (const auto* t = std::get_if<Threshold>(&policy)) {
    return "threshold(" + format_double(t->delta) + ")";
  }
  if (const auto* f = std::get_if<TopFraction>(&policy)) {
    return "topfrac(" + format_double(f->p) + ")";
  }
  return "average";
}

struct SimilarityMatrix {
  std::vector<std::string> rows;  // honeyfile words
  std::vector<std::string> cols;  // topic words
  RowMatrix values;               // rows.size() x cols.size(), in [0,1]

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return cols.size(); }
  std::size_t size() const { return rows.size() * cols.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

// S = rescale(H * T^T) over unit-length rows.
inline SimilarityMatrix similarity_matrix(const WordVectorSet& honeyfile,
                                          const WordVectorSet& topics) {
  if (honeyfile.empty()) {
    throw ScoringError("no embeddable words in the honeyfile");
  }
  if (topics.empty()) {
    throw ScoringError("no embeddable words in the topic set");
  }
  if (honeyfile.matrix.cols() != topics.matrix.cols()) {
    throw DomainError("honeyfile and topic vectors differ in dimension");
  }
  SimilarityMatrix s;
  s.rows = honeyfile.words;
  s.cols = topics.words;
  s.values.noalias() = honeyfile.matrix * topics.matrix.transpose();
  s.values = s.values.unaryExpr(
      [](double c) { return rescale_cosine(std::clamp(c, -1.0, 1.0)); });
  return s;
}

// Number of entries selected by TopFraction(p) out of n. The small slack
// keeps p*n that is integral in exact arithmetic from rounding up.
inline std::size_t top_fraction_count(double p, std::size_t n) {
  const double raw = std::ceil(p * static_cast<double>(n) - 1e-9);
  const auto m = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(m, n);
}

inline std::size_t count_at_least(const SimilarityMatrix& s, double delta) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (s.values.data()[i] >= delta) ++n;
  }
  return n;
}

inline double aggregate(const SimilarityMatrix& s, const AggregationPolicy& policy) {
  validate(policy);
  if (s.size() == 0) throw ScoringError("cannot aggregate an empty similarity matrix");
  const auto n = static_cast<double>(s.size());
  const double* data = s.values.data();
  const auto count = static_cast<std::size_t>(s.values.size());

  if (const auto* f = std::get_if<TopFraction>(&policy)) {
    std::vector<double> sorted(data, data + count);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t m = top_fraction_count(f->p, count);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += sorted[i];
    return sum / n;
  }

  // Average is Threshold(0): every entry is already >= 0.
  const double delta =
      std::holds_alternative<Threshold>(policy) ? std::get<Threshold>(policy).delta : 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (data[i] >= delta) sum += data[i];
  }
  return sum / n;
}

struct EnticementScore {
  double value = 0.0;
  AggregationPolicy policy;
  std::size_t n_honeyfile_words = 0;  // after OOV drop
  std::size_t n_topic_words = 0;      // after OOV drop
  std::size_t oov_honeyfile = 0;
  std::size_t oov_topics = 0;
};

// Scores an already preprocessed honeyfile against extracted topics.
inline EnticementScore score_prepared(const PreparedDocument& honeyfile,
                                      const TopicSet& topics,
                                      const EmbeddingTable& table,
                                      const AggregationPolicy& policy) {
  validate(policy);
  const auto h = embed_set(honeyfile.words, table);
  const auto t = embed_set(topics.words, table);
  EnticementScore out;
  out.policy = policy;
  out.n_honeyfile_words = h.size();
  out.n_topic_words = t.size();
  out.oov_honeyfile = h.oov.size();
  out.oov_topics = t.oov.size();
  out.value = aggregate(similarity_matrix(h, t), policy);
  return out;
}

// Full pipeline: preprocess both sides, extract topics from the context,
// embed, compare and aggregate.
inline EnticementScore tsm_score(const RawDocument& honeyfile,
                                 std::span<const RawDocument> context,
                                 const Preprocessor& prep,
                                 const TopicExtractor& extractor,
                                 const EmbeddingTable& table,
                                 const AggregationPolicy& policy) {
  if (context.empty()) throw InputError("empty local context");
  std::vector<PreparedDocument> prepared;
  prepared.reserve(context.size());
  for (const auto& d : context) prepared.push_back(prep.prepare(d));
  const TopicSet topics = extractor.extract(prepared);
  return score_prepared(prep.prepare(honeyfile), topics, table, policy);
}

}  // namespace tsm
