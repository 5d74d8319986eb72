#pragma once

// Topic-word extraction from a preprocessed local context. Two extractors
// share one interface: LDA fit by collapsed Gibbs sampling, and a plain
// document-frequency top-k.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tsm/error.hpp"
#include "tsm/format.hpp"
#include "tsm/rng.hpp"
#include "tsm/textprep.hpp"

namespace tsm {

struct TopicModelConfig {
  int num_topics = 5;
  int words_per_topic = 10;
  double alpha = 0.1;
  double beta = 0.01;
  int gibbs_iterations = 1000;
  std::uint64_t seed = 42;
  // Fit on each document's surviving token sequence instead of its word set.
  bool multiset_documents = false;

  void validate() const {
    if (num_topics < 1) throw ConfigError("num_topics must be >= 1");
    if (words_per_topic < 1) throw ConfigError("words_per_topic must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    if (gibbs_iterations < 1) throw ConfigError("gibbs_iterations must be >= 1");
  }
};

struct TopicSet {
  std::vector<std::string> words;  // deduplicated union of per_topic
  std::vector<std::vector<std::string>> per_topic;
  std::string extractor;  // "lda", "topk", ...

  std::size_t size() const { return words.size(); }
};

// Builds TopicSet::words as the first-occurrence union of the ranked lists.
inline TopicSet make_topic_set(std::vector<std::vector<std::string>> per_topic,
                               std::string extractor) {
  TopicSet ts;
  std::unordered_set<std::string> seen;
  for (const auto& list : per_topic) {
    for (const auto& w : list) {
      if (seen.insert(w).second) ts.words.push_back(w);
    }
  }
  ts.per_topic = std::move(per_topic);
  ts.extractor = std::move(extractor);
  return ts;
}

// Collapsed Gibbs sampler for LDA with symmetric priors.
//
//   p(z_i = k | z_-i, w) ∝ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)
//
// Vocabulary ids follow first appearance across the documents, so the
// sampler state (and its output) depends on document order.
class LdaGibbsSampler {
 public:
  LdaGibbsSampler(const std::vector<std::vector<std::string>>& docs,
                  int num_topics, double alpha, double beta, std::uint64_t seed)
      : k_(static_cast<std::size_t>(num_topics)),
        alpha_(alpha),
        beta_(beta),
        rng_(seed) {
    std::unordered_map<std::string, int> ids;
    docs_.reserve(docs.size());
    for (const auto& d : docs) {
      std::vector<int> ws;
      ws.reserve(d.size());
      for (const auto& w : d) {
        auto [it, fresh] = ids.try_emplace(w, static_cast<int>(vocab_.size()));
        if (fresh) vocab_.push_back(w);
        ws.push_back(it->second);
      }
      docs_.push_back(std::move(ws));
    }
    const std::size_t v = vocab_.size();
    n_dk_.assign(docs_.size() * k_, 0);
    n_kw_.assign(k_ * v, 0);
    n_k_.assign(k_, 0);
    z_.resize(docs_.size());
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      z_[d].resize(docs_[d].size());
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const auto k = static_cast<int>(rng_.below(k_));
        z_[d][i] = k;
        increment(d, docs_[d][i], k, +1);
      }
    }
    weights_.resize(k_);
  }

  std::size_t num_topics() const { return k_; }
  std::size_t num_documents() const { return docs_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  std::size_t num_tokens() const {
    std::size_t n = 0;
    for (const auto& d : docs_) n += d.size();
    return n;
  }

  long topic_count(std::size_t k) const { return n_k_[k]; }
  long topic_word_count(std::size_t k, std::size_t w) const {
    return n_kw_[k * vocab_.size() + w];
  }
  long doc_topic_count(std::size_t d, std::size_t k) const {
    return n_dk_[d * k_ + k];
  }
  const std::vector<std::vector<int>>& assignments() const { return z_; }

  // One pass over every token.
  void sweep() {
    const double vbeta = static_cast<double>(vocab_.size()) * beta_;
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const int w = docs_[d][i];
        increment(d, w, z_[d][i], -1);
        double total = 0.0;
        for (std::size_t k = 0; k < k_; ++k) {
          total += (static_cast<double>(n_dk_[d * k_ + k]) + alpha_) *
                   (static_cast<double>(n_kw_[k * vocab_.size() + w]) + beta_) /
                   (static_cast<double>(n_k_[k]) + vbeta);
          weights_[k] = total;
        }
        const double u = rng_.uniform() * total;
        std::size_t k = 0;
        while (k + 1 < k_ && weights_[k] <= u) ++k;
        z_[d][i] = static_cast<int>(k);
        increment(d, w, static_cast<int>(k), +1);
      }
    }
  }

  // Smoothed topic-word distribution (n_kw + beta) / (n_k + V*beta).
  std::vector<double> topic_word_distribution(std::size_t k) const {
    const std::size_t v = vocab_.size();
    const double denom = static_cast<double>(n_k_[k]) + static_cast<double>(v) * beta_;
    std::vector<double> phi(v);
    for (std::size_t w = 0; w < v; ++w) {
      phi[w] = (static_cast<double>(n_kw_[k * v + w]) + beta_) / denom;
    }
    return phi;
  }

  // The n most probable words of topic k, ties broken by word ascending.
  std::vector<std::string> top_words(std::size_t k, std::size_t n) const {
    const std::size_t v = vocab_.size();
    std::vector<std::size_t> order(v);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
      const long ca = n_kw_[k * v + a];
      const long cb = n_kw_[k * v + b];
      if (ca != cb) return ca > cb;
      return vocab_[a] < vocab_[b];
    };
    n = std::min(n, v);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                      order.end(), better);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(vocab_[order[i]]);
    return out;
  }

 private:
  void increment(std::size_t d, int w, int k, int delta) {
    n_dk_[d * k_ + static_cast<std::size_t>(k)] += delta;
    n_kw_[static_cast<std::size_t>(k) * vocab_.size() + static_cast<std::size_t>(w)] += delta;
    n_k_[static_cast<std::size_t>(k)] += delta;
  }

  std::size_t k_;
  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<std::string> vocab_;
  std::vector<std::vector<int>> docs_;
  std::vector<std::vector<int>> z_;
  std::vector<long> n_dk_;
  std::vector<long> n_kw_;
  std::vector<long> n_k_;
  std::vector<double> weights_;
};

namespace detail {

inline std::vector<std::vector<std::string>> lda_documents(
    std::span<const PreparedDocument> context, bool multiset) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(context.size());
  for (const auto& d : context) docs.push_back(multiset ? d.tokens : d.words);
  return docs;
}

inline std::size_t union_vocabulary_size(
    const std::vector<std::vector<std::string>>& docs) {
  std::unordered_set<std::string> vocab;
  for (const auto& d : docs) vocab.insert(d.begin(), d.end());
  return vocab.size();
}

}  // namespace detail

// Fits LDA to the context and returns the union of each topic's
// words_per_topic most probable words. `on_sweep` (optional) is called after
// every sweep with the sampler, for diagnostics.
inline TopicSet extract_topics_lda(
    std::span<const PreparedDocument> context, const TopicModelConfig& cfg,
    const std::function<void(const LdaGibbsSampler&, int)>& on_sweep = {}) {
  cfg.validate();
  if (context.empty()) throw InputError("LDA: empty local context");
  const auto docs = detail::lda_documents(context, cfg.multiset_documents);
  const std::size_t vocab = detail::union_vocabulary_size(docs);
  if (vocab < static_cast<std::size_t>(cfg.num_topics)) {
    throw InputError("LDA: vocabulary of " + std::to_string(vocab) +
                     " words is smaller than num_topics=" +
                     std::to_string(cfg.num_topics));
  }

  LdaGibbsSampler sampler(docs, cfg.num_topics, cfg.alpha, cfg.beta, cfg.seed);
  for (int it = 0; it < cfg.gibbs_iterations; ++it) {
    sampler.sweep();
    if (on_sweep) on_sweep(sampler, it);
  }

  std::vector<std::vector<std::string>> per_topic;
  for (std::size_t k = 0; k < sampler.num_topics(); ++k) {
    per_topic.push_back(
        sampler.top_words(k, static_cast<std::size_t>(cfg.words_per_topic)));
  }
  return make_topic_set(std::move(per_topic), "lda");
}

// The k words with the highest document frequency across the context, ties
// broken by word ascending.
inline TopicSet extract_topics_topk(std::span<const PreparedDocument> context,
                                    std::size_t k) {
  if (context.empty()) throw InputError("top-k: empty local context");
  if (k == 0) throw ConfigError("top-k: k must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& d : context) {
    std::unordered_set<std::string> seen;
    for (const auto& w : d.words) {
      if (seen.insert(w).second) ++df[w];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, n] : ranked) words.push_back(std::move(w));
  return make_topic_set({std::move(words)}, "topk");
}

// Extension point for topic models. Implementations must be deterministic
// and const-callable from several threads.
class TopicExtractor {
 public:
  virtual ~TopicExtractor() = default;
  virtual TopicSet extract(std::span<const PreparedDocument> context) const = 0;
  virtual std::string name() const = 0;
  // Flat key/value description used in run metadata.
  virtual std::vector<std::pair<std::string, std::string>> parameters() const = 0;
};

class LdaExtractor final : public TopicExtractor {
 public:
  explicit LdaExtractor(TopicModelConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  TopicSet extract(std::span<const PreparedDocument> context) const override {
    return extract_topics_lda(context, cfg_);
  }
  std::string name() const override { return "lda"; }
  std::vector<std::pair<std::string, std::string>> parameters() const override {
    return {{"num_topics", std::to_string(cfg_.num_topics)},
            {"words_per_topic", std::to_string(cfg_.words_per_topic)},
            {"alpha", format_double(cfg_.alpha)},
            {"beta", format_double(cfg_.beta)},
            {"gibbs_iterations", std::to_string(cfg_.gibbs_iterations)},
            {"seed", std::to_string(cfg_.seed)},
            {"multiset_documents", cfg_.multiset_documents ? "true" : "false"}};
  }
  const TopicModelConfig& config() const { return cfg_; }

 private:
  TopicModelConfig cfg_;
};

class TopKExtractor final : public TopicExtractor {
 public:
  explicit TopKExtractor(std::size_t k) : k_(k) {
    if (k_ == 0) throw ConfigError("top-k: k must be >= 1");
  }

  TopicSet extract(std::span<const PreparedDocument> context) const override {
    return extract_topics_topk(context, k_);
  }
  std::string name() const override { return "topk"; }
  std::vector<std::pair<std::string, std::string>> parameters() const override {
    return {{"k", std::to_string(k_)}};
  }

 private:
  std::size_t k_;
};

}  // namespace tsm
