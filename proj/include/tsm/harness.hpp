#pragma once

// Evaluation harness: windows category corpora into local contexts, scores
// every honeyfile against every context and reduces the scores to a
// median matrix of (honeyfile category x context category).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "tsm/corpus.hpp"
#include "tsm/embedding.hpp"
#include "tsm/error.hpp"
#include "tsm/format.hpp"
#include "tsm/rng.hpp"
#include "tsm/scoring.hpp"
#include "tsm/textprep.hpp"
#include "tsm/topics.hpp"

namespace tsm {

struct LocalContext {
  std::string id;
  std::string category;
  std::vector<RawDocument> files;
};

enum class ContextOrdering { Date, Random };

inline std::string ordering_name(ContextOrdering o) {
  return o == ContextOrdering::Date ? "date" : "random";
}

inline ContextOrdering parse_ordering(std::string_view s) {
  if (s == "date") return ContextOrdering::Date;
  if (s == "random") return ContextOrdering::Random;
  throw ConfigError("unknown context ordering '" + std::string(s) +
                    "' (expected date|random)");
}

// Splits each category into consecutive windows of `size` files. "date"
// ordering sorts by document id (file name); "random" shuffles that sorted
// list with a seed derived from `seed` and the category's rank. A trailing
// window shorter than `size` is dropped.
inline std::vector<LocalContext> build_local_contexts(
    const std::vector<RawDocument>& docs, std::size_t size,
    ContextOrdering ordering, std::uint64_t seed = 0) {
  if (size == 0) throw InputError("context size must be >= 1");
  std::vector<LocalContext> out;
  std::uint64_t rank = 0;
  for (auto& [category, files] : group_by_category(docs)) {
    if (files.size() < size) {
      throw InputError("category '" + category + "' has " +
                       std::to_string(files.size()) +
                       " files, fewer than the context size " + std::to_string(size));
    }
    std::sort(files.begin(), files.end(),
              [](const RawDocument& a, const RawDocument& b) { return a.id < b.id; });
    if (ordering == ContextOrdering::Random) {
      Rng rng(mix_seed(seed, rank));
      rng.shuffle(std::span<RawDocument>(files));
    }
    ++rank;
    const std::size_t windows = files.size() / size;
    for (std::size_t w = 0; w < windows; ++w) {
      LocalContext ctx;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%03zu", w);
      ctx.id = category + "-ctx" + buf;
      ctx.category = category;
      ctx.files.assign(files.begin() + static_cast<std::ptrdiff_t>(w * size),
                       files.begin() + static_cast<std::ptrdiff_t>((w + 1) * size));
      out.push_back(std::move(ctx));
    }
  }
  return out;
}

inline std::vector<LocalContext> build_local_contexts(
    const std::filesystem::path& corpus_dir, std::size_t size,
    ContextOrdering ordering, std::uint64_t seed = 0) {
  return build_local_contexts(load_corpus(corpus_dir), size, ordering, seed);
}

struct ExtractorSpec {
  std::string kind = "lda";  // "lda" | "topk"
  TopicModelConfig lda;
  std::size_t topk = 50;

  std::string label() const {
    return kind == "topk" ? "topk-" + std::to_string(topk) : kind;
  }
};

inline std::shared_ptr<const TopicExtractor> make_extractor(const ExtractorSpec& spec) {
  if (spec.kind == "lda") return std::make_shared<LdaExtractor>(spec.lda);
  if (spec.kind == "topk") return std::make_shared<TopKExtractor>(spec.topk);
  throw ConfigError("unknown extractor '" + spec.kind + "' (expected lda|topk)");
}

// Accepts "lda", "topk" (keeps base.topk) or "topk-N".
inline ExtractorSpec parse_extractor(std::string_view label, ExtractorSpec base) {
  if (label == "lda") {
    base.kind = "lda";
  } else if (label == "topk") {
    base.kind = "topk";
  } else if (label.starts_with("topk-")) {
    std::size_t k = 0;
    const auto digits = label.substr(5);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ConfigError("bad extractor label '" + std::string(label) + "'");
    }
    for (char c : digits) k = k * 10 + static_cast<std::size_t>(c - '0');
    if (k == 0) throw ConfigError("top-k: k must be >= 1");
    base.kind = "topk";
    base.topk = k;
  } else {
    throw ConfigError("unknown extractor '" + std::string(label) + "'");
  }
  return base;
}

struct EvalConfig {
  AggregationPolicy policy = Threshold{0.9};
  ExtractorSpec extractor;
  std::size_t context_size = 10;
  ContextOrdering ordering = ContextOrdering::Date;
  std::uint64_t seed = 42;  // context shuffling; LDA has its own seed
  unsigned jobs = 1;
};

struct PairResult {
  std::string honeyfile_id;
  std::string honeyfile_category;
  std::string context_id;
  std::string context_category;
  std::optional<EnticementScore> score;
  std::string error;  // empty on success
};

struct EvalMatrix {
  std::vector<std::string> rows;  // honeyfile categories
  std::vector<std::string> cols;  // context categories
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::vector<std::size_t>> pair_counts;  // successful pairs per cell
  EvalConfig config;
  std::string extractor_label;

  std::optional<double> cell(std::string_view row, std::string_view col) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] != row) continue;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] == col) return cells[i][j];
      }
    }
    return std::nullopt;
  }
};

struct EvalResult {
  EvalMatrix matrix;
  std::vector<PairResult> pairs;  // ordered by (honeyfile id, context id)
  std::size_t failed_pairs = 0;
  std::size_t num_honeyfiles = 0;
  std::size_t num_contexts = 0;
  std::map<std::string, std::size_t> files_per_category;
};

// Median with the lower middle element for even counts, so the result is
// always one of the inputs.
inline double lower_median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all threads finish.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Topic sets for a list of contexts; a failed extraction is kept as an
// error message so that its pairs can be reported rather than aborting.
struct ContextTopics {
  std::vector<std::optional<TopicSet>> topics;
  std::vector<std::string> errors;
};

inline ContextTopics extract_context_topics(const std::vector<LocalContext>& contexts,
                                            const Preprocessor& prep,
                                            const TopicExtractor& extractor,
                                            unsigned jobs) {
  ContextTopics out;
  out.topics.resize(contexts.size());
  out.errors.resize(contexts.size());
  parallel_for(contexts.size(), jobs, [&](std::size_t c) {
    try {
      const auto prepared = preprocess_all(contexts[c].files, prep);
      out.topics[c] = extractor.extract(prepared);
    } catch (const Error& e) {
      out.errors[c] = e.what();
    }
  });
  return out;
}

// Scores every (honeyfile, context) pair using precomputed context topics
// and reduces to the median matrix.
inline EvalResult evaluate_with_topics(const std::vector<RawDocument>& honeyfiles,
                                       const std::vector<LocalContext>& contexts,
                                       const ContextTopics& topics,
                                       const Preprocessor& prep,
                                       const EmbeddingTable& table,
                                       const EvalConfig& cfg,
                                       std::string extractor_label) {
  validate(cfg.policy);
  if (honeyfiles.empty()) throw InputError("no honeyfiles to evaluate");
  if (contexts.empty()) throw InputError("no local contexts to evaluate");

  std::vector<std::size_t> h_order(honeyfiles.size());
  std::vector<std::size_t> c_order(contexts.size());
  std::iota(h_order.begin(), h_order.end(), std::size_t{0});
  std::iota(c_order.begin(), c_order.end(), std::size_t{0});
  std::stable_sort(h_order.begin(), h_order.end(), [&](auto a, auto b) {
    return honeyfiles[a].id < honeyfiles[b].id;
  });
  std::stable_sort(c_order.begin(), c_order.end(), [&](auto a, auto b) {
    return contexts[a].id < contexts[b].id;
  });

  std::vector<PreparedDocument> prepared(honeyfiles.size());
  parallel_for(honeyfiles.size(), cfg.jobs,
               [&](std::size_t i) { prepared[i] = prep.prepare(honeyfiles[i]); });

  EvalResult result;
  result.num_honeyfiles = honeyfiles.size();
  result.num_contexts = contexts.size();
  for (const auto& c : contexts) result.files_per_category[c.category] += c.files.size();

  const std::size_t nc = contexts.size();
  result.pairs.resize(honeyfiles.size() * nc);
  parallel_for(result.pairs.size(), cfg.jobs, [&](std::size_t p) {
    const std::size_t hi = h_order[p / nc];
    const std::size_t ci = c_order[p % nc];
    PairResult& pr = result.pairs[p];
    pr.honeyfile_id = honeyfiles[hi].id;
    pr.honeyfile_category = honeyfiles[hi].category;
    pr.context_id = contexts[ci].id;
    pr.context_category = contexts[ci].category;
    if (!topics.topics[ci]) {
      pr.error = topics.errors[ci];
      return;
    }
    try {
      pr.score = score_prepared(prepared[hi], *topics.topics[ci], table, cfg.policy);
    } catch (const Error& e) {
      pr.error = e.what();
    }
  });

  std::map<std::string, std::map<std::string, std::vector<double>>> groups;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  for (const auto& h : honeyfiles) rows.push_back(h.category);
  for (const auto& c : contexts) cols.push_back(c.category);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  for (const auto& pr : result.pairs) {
    if (!pr.score) {
      ++result.failed_pairs;
      continue;
    }
    groups[pr.honeyfile_category][pr.context_category].push_back(pr.score->value);
  }

  EvalMatrix& m = result.matrix;
  m.rows = rows;
  m.cols = cols;
  m.config = cfg;
  m.extractor_label = std::move(extractor_label);
  m.cells.assign(rows.size(), std::vector<std::optional<double>>(cols.size()));
  m.pair_counts.assign(rows.size(), std::vector<std::size_t>(cols.size(), 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      auto& values = groups[rows[i]][cols[j]];
      m.pair_counts[i][j] = values.size();
      if (!values.empty()) m.cells[i][j] = lower_median(values);
    }
  }
  return result;
}

inline EvalResult cross_evaluate(const std::vector<RawDocument>& honeyfiles,
                                 const std::vector<LocalContext>& contexts,
                                 const Preprocessor& prep,
                                 const EmbeddingTable& table,
                                 const TopicExtractor& extractor,
                                 const EvalConfig& cfg) {
  const auto topics = extract_context_topics(contexts, prep, extractor, cfg.jobs);
  return evaluate_with_topics(honeyfiles, contexts, topics, prep, table, cfg,
                              extractor.name());
}

inline EvalResult cross_evaluate(const std::vector<RawDocument>& honeyfiles,
                                 const std::vector<LocalContext>& contexts,
                                 const Preprocessor& prep,
                                 const EmbeddingTable& table,
                                 const EvalConfig& cfg) {
  const auto extractor = make_extractor(cfg.extractor);
  const auto topics = extract_context_topics(contexts, prep, *extractor, cfg.jobs);
  return evaluate_with_topics(honeyfiles, contexts, topics, prep, table, cfg,
                              cfg.extractor.label());
}

enum class SweepParameter { Delta, TopFraction, ContextSize, Extractor };

inline SweepParameter parse_sweep_parameter(std::string_view s) {
  if (s == "delta") return SweepParameter::Delta;
  if (s == "top_fraction") return SweepParameter::TopFraction;
  if (s == "context_size") return SweepParameter::ContextSize;
  if (s == "extractor") return SweepParameter::Extractor;
  throw ConfigError("unknown sweep parameter '" + std::string(s) +
                    "' (expected delta|top_fraction|context_size|extractor)");
}

inline std::string sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::Delta: return "delta";
    case SweepParameter::TopFraction: return "top_fraction";
    case SweepParameter::ContextSize: return "context_size";
    default: return "extractor";
  }
}

// One evaluation per value. `corpus` holds the category-labelled context
// documents; contexts are rebuilt only when the context size changes and
// topics are re-extracted only when contexts or the extractor change.
inline std::vector<EvalResult> sweep(const std::vector<RawDocument>& honeyfiles,
                                     const std::vector<RawDocument>& corpus,
                                     const Preprocessor& prep,
                                     const EmbeddingTable& table,
                                     const EvalConfig& base,
                                     SweepParameter parameter,
                                     const std::vector<std::string>& values) {
  if (values.empty()) throw InputError("sweep needs at least one value");

  auto parse_real = [](const std::string& v) {
    double x = 0.0;
    if (!parse_double(v, x)) throw ConfigError("bad sweep value '" + v + "'");
    return x;
  };

  std::vector<EvalConfig> configs;
  for (const auto& v : values) {
    EvalConfig cfg = base;
    switch (parameter) {
      case SweepParameter::Delta:
        cfg.policy = Threshold{parse_real(v)};
        break;
      case SweepParameter::TopFraction:
        cfg.policy = TopFraction{parse_real(v)};
        break;
      case SweepParameter::ContextSize: {
        const double x = parse_real(v);
        if (!(x >= 1.0) || x != std::floor(x)) throw ConfigError("bad context size '" + v + "'");
        cfg.context_size = static_cast<std::size_t>(x);
        break;
      }
      case SweepParameter::Extractor:
        cfg.extractor = parse_extractor(v, base.extractor);
        break;
    }
    validate(cfg.policy);
    configs.push_back(cfg);
  }

  std::vector<EvalResult> results;
  std::map<std::size_t, std::vector<LocalContext>> contexts_by_size;
  std::map<std::pair<std::size_t, std::string>, ContextTopics> topics_cache;
  for (const auto& cfg : configs) {
    auto& contexts = contexts_by_size[cfg.context_size];
    if (contexts.empty()) {
      contexts = build_local_contexts(corpus, cfg.context_size, cfg.ordering, cfg.seed);
    }
    const std::string label = cfg.extractor.label();
    auto key = std::make_pair(cfg.context_size, label);
    auto it = topics_cache.find(key);
    if (it == topics_cache.end()) {
      const auto extractor = make_extractor(cfg.extractor);
      it = topics_cache.emplace(key, extract_context_topics(contexts, prep, *extractor,
                                                            cfg.jobs)).first;
    }
    results.push_back(
        evaluate_with_topics(honeyfiles, contexts, it->second, prep, table, cfg, label));
  }
  return results;
}

// Smallest (diagonal - largest off-diagonal) over rows whose label is also a
// column. Positive means strict diagonal dominance. Rows without a matching
// column are skipped; a missing diagonal cell yields nullopt.
inline std::optional<double> diagonal_margin(const EvalMatrix& m) {
  std::optional<double> margin;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    auto col = std::find(m.cols.begin(), m.cols.end(), m.rows[i]);
    if (col == m.cols.end()) continue;
    const auto d = static_cast<std::size_t>(col - m.cols.begin());
    if (!m.cells[i][d]) return std::nullopt;
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      if (j == d || !m.cells[i][j]) continue;
      const double gap = *m.cells[i][d] - *m.cells[i][j];
      if (!margin || gap < *margin) margin = gap;
    }
  }
  return margin;
}

inline void write_matrix_csv(const EvalMatrix& m, std::ostream& out) {
  out << "honeyfile_category";
  for (const auto& c : m.cols) out << ',' << csv_field(c);
  out << '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out << csv_field(m.rows[i]);
    for (const auto& cell : m.cells[i]) {
      out << ',';
      if (cell) out << format_double(*cell);
    }
    out << '\n';
  }
}

inline void write_pairs_csv(const EvalResult& r, std::ostream& out) {
  out << "honeyfile_id,honeyfile_category,context_id,context_category,score,policy,error\n";
  const std::string policy = describe(r.matrix.config.policy);
  for (const auto& p : r.pairs) {
    out << csv_field(p.honeyfile_id) << ',' << csv_field(p.honeyfile_category) << ','
        << csv_field(p.context_id) << ',' << csv_field(p.context_category) << ',';
    if (p.score) out << format_double(p.score->value);
    out << ',' << policy << ',' << csv_field(p.error) << '\n';
  }
}

}  // namespace tsm
