#pragma once

// JSON envelopes for scores and evaluation runs.

#include <json.hpp>

#include <string>
#include <variant>

#include "tsm/baselines.hpp"
#include "tsm/harness.hpp"
#include "tsm/scoring.hpp"

namespace tsm {

inline void add_policy_fields(nlohmann::ordered_json& j, const AggregationPolicy& policy) {
  j["policy"] = policy_name(policy);
  if (const auto* t = std::get_if<Threshold>(&policy)) j["delta"] = t->delta;
  if (const auto* f = std::get_if<TopFraction>(&policy)) j["p"] = f->p;
}

inline nlohmann::ordered_json to_json(const EnticementScore& s) {
  nlohmann::ordered_json j;
  j["kind"] = "tsm";
  j["value"] = s.value;
  add_policy_fields(j, s.policy);
  j["n_honeyfile_words"] = s.n_honeyfile_words;
  j["n_topic_words"] = s.n_topic_words;
  j["oov_honeyfile"] = s.oov_honeyfile;
  j["oov_topics"] = s.oov_topics;
  return j;
}

inline nlohmann::ordered_json to_json(const BaselineScore& s) {
  nlohmann::ordered_json j;
  j["kind"] = s.kind;
  j["value"] = s.value;
  if (s.kind == "common-words") j["matched"] = s.matched;
  return j;
}

inline nlohmann::ordered_json to_json(const EvalConfig& cfg) {
  nlohmann::ordered_json j;
  add_policy_fields(j, cfg.policy);
  j["extractor"] = cfg.extractor.kind;
  j["num_topics"] = cfg.extractor.lda.num_topics;
  j["words_per_topic"] = cfg.extractor.lda.words_per_topic;
  j["alpha"] = cfg.extractor.lda.alpha;
  j["beta"] = cfg.extractor.lda.beta;
  j["gibbs_iterations"] = cfg.extractor.lda.gibbs_iterations;
  j["lda_seed"] = cfg.extractor.lda.seed;
  j["multiset_documents"] = cfg.extractor.lda.multiset_documents;
  j["topk"] = cfg.extractor.topk;
  j["context_size"] = cfg.context_size;
  j["ordering"] = ordering_name(cfg.ordering);
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  return j;
}

// Run metadata without timestamps or host details, so repeated runs with
// the same inputs write identical files.
inline nlohmann::ordered_json run_metadata(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["config"] = to_json(r.matrix.config);
  j["extractor_label"] = r.matrix.extractor_label;
  j["num_honeyfiles"] = r.num_honeyfiles;
  j["num_contexts"] = r.num_contexts;
  j["num_pairs"] = r.pairs.size();
  j["failed_pairs"] = r.failed_pairs;
  j["context_files_per_category"] = r.files_per_category;
  j["rows"] = r.matrix.rows;
  j["cols"] = r.matrix.cols;
  return j;
}

}  // namespace tsm
