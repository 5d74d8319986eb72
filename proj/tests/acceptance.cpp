// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsm/tsm.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = TSM_DATA_DIR;
const std::string kCli = TSM_CLI_PATH;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Shipped {
  tsm::EmbeddingTable table;
  tsm::Preprocessor prep;
  std::vector<tsm::RawDocument> honeyfiles;
  std::vector<tsm::RawDocument> corpus;
};

const Shipped& shipped() {
  static const Shipped s{
      tsm::load_embeddings(kData + "/synth/embeddings.txt"),
      tsm::Preprocessor(
          tsm::PrepConfig{kData + "/stopwords_en.txt", kData + "/lemmas_en.tsv", true, true}),
      tsm::load_corpus(kData + "/synth/honeyfiles"), tsm::load_corpus(kData + "/synth/corpus")};
  return s;
}

tsm::EvalResult evaluate_shipped(const tsm::EvalConfig& cfg) {
  const auto& s = shipped();
  const auto contexts =
      tsm::build_local_contexts(s.corpus, cfg.context_size, cfg.ordering, cfg.seed);
  return tsm::cross_evaluate(s.honeyfiles, contexts, s.prep, s.table, cfg);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Outcome c1_oracle_equivalence() {
  tsm::Rng rng(101);
  tsm::EmbeddingTable table(20);
  std::vector<oracle::Vec> vecs;
  std::vector<std::string> words;
  for (int i = 0; i < 1000; ++i) {
    oracle::Vec v(20);
    for (auto& x : v) x = rng.normal() * (0.1 + 5.0 * rng.uniform());
    words.push_back("w" + std::to_string(i));
    vecs.push_back(v);
    table.add(words.back(), v);
  }
  const auto start = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    auto draw = [&](std::vector<std::string>& ws, std::vector<oracle::Vec>& vs) {
      std::vector<std::size_t> ids(words.size());
      std::iota(ids.begin(), ids.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(ids));
      ids.resize(1 + rng.below(50));
      for (auto id : ids) {
        ws.push_back(words[id]);
        vs.push_back(vecs[id]);
      }
    };
    std::vector<std::string> hw, tw;
    std::vector<oracle::Vec> hv, tv;
    draw(hw, hv);
    draw(tw, tv);
    const auto s =
        tsm::similarity_matrix(tsm::embed_set(hw, table), tsm::embed_set(tw, table));
    const auto expected = oracle::similarity_loop(hv, tv);
    for (std::size_t i = 0; i < hw.size(); ++i) {
      for (std::size_t j = 0; j < tw.size(); ++j) {
        worst = std::max(worst, std::abs(s(i, j) - expected[i][j]));
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && elapsed < 5.0,
          "max abs diff " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

tsm::SimilarityMatrix two_by_two() {
  tsm::SimilarityMatrix s;
  s.rows = {"h0", "h1"};
  s.cols = {"t0", "t1"};
  s.values.resize(2, 2);
  s.values << 0.95, 0.2, 0.91, 0.3;
  return s;
}

Outcome c2_hand_trace() {
  const auto s = two_by_two();
  const double mean = (0.95 + 0.2 + 0.91 + 0.3) / 4.0;
  const double e = tsm::aggregate(s, tsm::Threshold{0.9});
  const double d0 = tsm::aggregate(s, tsm::Threshold{0.0});
  const double top = tsm::aggregate(s, tsm::TopFraction{1.0});
  const bool ok = std::abs(e - 0.465) <= 1e-12 && std::abs(d0 - mean) <= 1e-12 &&
                  std::abs(top - mean) <= 1e-12;
  return {ok, "E=" + tsm::format_double(e) + ", delta=0 " + tsm::format_double(d0) +
                  ", top(1.0) " + tsm::format_double(top)};
}

Outcome c3_unit_cases() {
  const std::vector<double> x{1, 0}, y{0, 1}, z{-1, 0};
  const double same = tsm::normalized_similarity(x, x);
  const double orth = tsm::normalized_similarity(x, y);
  const double opp = tsm::normalized_similarity(x, z);
  const bool ok = std::abs(same - 1.0) <= 1e-12 && std::abs(orth - 0.5) <= 1e-12 &&
                  std::abs(opp) <= 1e-12;
  return {ok, fmt(same) + " / " + fmt(orth) + " / " + fmt(opp)};
}

Outcome dominance(const tsm::EvalResult& r, double required) {
  const auto margin = tsm::diagonal_margin(r.matrix);
  if (!margin) return {false, "missing diagonal cell"};
  return {*margin >= required && *margin > 0.0 && r.failed_pairs == 0,
          "margin " + fmt(*margin)};
}

Outcome c4_dominance() {
  const auto start = Clock::now();
  const auto r = evaluate_shipped({});
  const double elapsed = seconds_since(start);
  auto out = dominance(r, 0.02);
  out.pass = out.pass && elapsed < 120.0;
  out.detail += ", " + fmt(elapsed) + " s";
  return out;
}

Outcome c5_lorem_floor() {
  const auto r = evaluate_shipped({});
  double worst = 0.0;
  std::size_t lorem_pairs = 0;
  for (const auto& p : r.pairs) {
    if (p.honeyfile_category != "lorem") continue;
    if (!p.score) return {false, "unscored pair " + p.honeyfile_id + " x " + p.context_id};
    ++lorem_pairs;
    worst = std::max(worst, p.score->value);
  }
  return {lorem_pairs > 0 && worst <= 0.05,
          std::to_string(lorem_pairs) + " pairs, max " + fmt(worst)};
}

Outcome c6_sweeps() {
  struct Variant {
    std::string name;
    tsm::EvalConfig cfg;
    double required;
  };
  std::vector<Variant> variants;
  for (double d : {0.85, 0.95}) {
    tsm::EvalConfig cfg;
    cfg.policy = tsm::Threshold{d};
    variants.push_back({"delta=" + fmt(d), cfg, 0.02});
  }
  {
    // Any TopFraction(p) score is at most about p, so only strict
    // dominance is meaningful here.
    tsm::EvalConfig cfg;
    cfg.policy = tsm::TopFraction{0.005};
    variants.push_back({"topfrac(0.005)", cfg, 0.0});
  }
  for (std::size_t n : {5u, 20u}) {
    tsm::EvalConfig cfg;
    cfg.context_size = n;
    variants.push_back({"size=" + std::to_string(n), cfg, 0.02});
  }
  {
    tsm::EvalConfig cfg;
    cfg.extractor = tsm::parse_extractor("topk-50", {});
    variants.push_back({"topk-50", cfg, 0.02});
  }
  Outcome all{true, ""};
  for (const auto& v : variants) {
    const auto o = dominance(evaluate_shipped(v.cfg), v.required);
    all.pass = all.pass && o.pass;
    all.detail += (all.detail.empty() ? "" : "; ") + v.name + " " + o.detail;
  }
  return all;
}

Outcome c7_lda() {
  double worst_purity = 1.0;
  double worst_sum = 0.0;
  bool conserved = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto corpus = oracle::two_topic_corpus(40, 1000 + seed);
    tsm::TopicModelConfig cfg;
    cfg.num_topics = 2;
    cfg.seed = seed;
    const auto ts = tsm::extract_topics_lda(corpus.docs, cfg);
    worst_purity = std::min(worst_purity, oracle::purity(ts.per_topic, corpus.vocab_a));

    std::vector<std::vector<std::string>> docs;
    for (const auto& d : corpus.docs) docs.push_back(d.words);
    tsm::LdaGibbsSampler s(docs, 2, cfg.alpha, cfg.beta, seed);
    const auto tokens = static_cast<long>(s.num_tokens());
    for (int sweep = 0; sweep < 100; ++sweep) {
      s.sweep();
      long total = 0;
      for (std::size_t k = 0; k < 2; ++k) {
        total += s.topic_count(k);
        const auto phi = s.topic_word_distribution(k);
        worst_sum = std::max(worst_sum,
                             std::abs(std::accumulate(phi.begin(), phi.end(), 0.0) - 1.0));
      }
      conserved = conserved && total == tokens;
    }
  }
  return {worst_purity >= 0.9 && worst_sum <= 1e-9 && conserved,
          "min purity " + fmt(worst_purity) + ", max |sum-1| " + fmt(worst_sum) +
              (conserved ? ", counts conserved" : ", counts NOT conserved")};
}

Outcome c8_paraphrase() {
  const std::vector<std::pair<std::string, std::string>> concepts = {
      {"doctor", "physician"}, {"examine", "check"}, {"sick", "ill"},
      {"patient", ""},         {"yesterday", ""}};
  tsm::EmbeddingTable table(2 * concepts.size());
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    std::vector<double> a(2 * concepts.size(), 0.0);
    a[2 * c] = 1.0;
    table.add(concepts[c].first, a);
    if (concepts[c].second.empty()) continue;
    std::vector<double> b(2 * concepts.size(), 0.0);
    b[2 * c] = 0.8;
    b[2 * c + 1] = 0.6;
    table.add(concepts[c].second, b);
  }
  const tsm::Preprocessor prep(tsm::builtin_stopwords(),
                               {{"examined", "examine"}, {"checked", "check"}}, true);
  const auto a = prep.prepare({"a", "The doctor examined the sick patient yesterday", ""});
  const auto b = prep.prepare({"b", "Yesterday a physician checked the ill patient", ""});
  const std::vector<tsm::PreparedDocument> ctx{b};
  const auto common = tsm::common_word_count(a, ctx, false).value;
  const auto s =
      tsm::similarity_matrix(tsm::embed_set(a.words, table), tsm::embed_set(b.words, table));
  const auto semantic = tsm::count_at_least(s, 0.75);
  return {common < static_cast<double>(semantic),
          "common words " + fmt(common) + ", pairs >= 0.75: " + std::to_string(semantic)};
}

Outcome c9_determinism() {
  const fs::path root = fs::temp_directory_path() / "tsm_acceptance_determinism";
  fs::remove_all(root);
  const std::string base = kCli + " evaluate --honeyfile " + kData +
                           "/synth/honeyfiles --context " + kData +
                           "/synth/corpus --embeddings " + kData +
                           "/synth/embeddings.txt --stopwords " + kData +
                           "/stopwords_en.txt --lemmas " + kData + "/lemmas_en.tsv";
  struct Run {
    std::string name;
    std::string flags;
  };
  const std::vector<Run> runs = {{"a", " --jobs 1"},
                                 {"b", " --jobs 1"},
                                 {"c", " --jobs 4"},
                                 {"r1", " --ordering random --seed 7 --jobs 1"},
                                 {"r2", " --ordering random --seed 7 --jobs 4"}};
  for (const auto& r : runs) {
    const auto res = oracle::run(base + r.flags + " --out-dir " + (root / r.name).string(),
                                 root / ("log_" + r.name));
    if (res.exit_code != 0) return {false, "run " + r.name + " exited " +
                                               std::to_string(res.exit_code) + ": " + res.err};
  }
  auto same = [&](const std::string& x, const std::string& y) {
    for (const char* f : {"matrix.csv", "pairs.csv"}) {
      const auto a = oracle::read_file(root / x / f);
      if (a.empty() || a != oracle::read_file(root / y / f)) return false;
    }
    return true;
  };
  const bool ok = same("a", "b") && same("a", "c") && same("r1", "r2");
  return {ok, ok ? "matrix.csv and pairs.csv identical across 5 runs"
                 : "CSV outputs differ"};
}

Outcome c10_performance() {
  tsm::Rng rng(303);
  const std::size_t n_words = 50000;
  const std::size_t dim = 100;
  tsm::EmbeddingTable table(dim);
  std::vector<std::string> vocab;
  vocab.reserve(n_words);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n_words; ++i) {
    std::string w = "q";
    for (std::size_t x = i, k = 0; k < 4; ++k, x /= 26) w += static_cast<char>('a' + x % 26);
    for (auto& c : v) c = rng.normal();
    table.add(w, v);
    vocab.push_back(std::move(w));
  }
  auto text = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += vocab[rng.below(vocab.size())] + " ";
    return s;
  };
  const tsm::RawDocument honeyfile{"h", text(500), ""};
  std::vector<tsm::RawDocument> context;
  for (int f = 0; f < 10; ++f) context.push_back({"c" + std::to_string(f), text(500), ""});
  const tsm::Preprocessor prep;
  const tsm::TopKExtractor topk(50);

  const auto start = Clock::now();
  const auto score = tsm::tsm_score(honeyfile, context, prep, topk, table, tsm::Threshold{0.9});
  const double elapsed = seconds_since(start);
  return {elapsed < 1.0 && score.n_honeyfile_words > 0 && score.n_topic_words == 50,
          fmt(elapsed * 1000.0) + " ms for " + std::to_string(score.n_honeyfile_words) + "x" +
              std::to_string(score.n_topic_words)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 matrix product matches pairwise oracle", c1_oracle_equivalence},
      {"C2 aggregation hand trace", c2_hand_trace},
      {"C3 normalized similarity unit cases", c3_unit_cases},
      {"C4 diagonal dominance on shipped corpus", c4_dominance},
      {"C5 Lorem Ipsum floor", c5_lorem_floor},
      {"C6 dominance under parameter sweeps", c6_sweeps},
      {"C7 LDA sanity", c7_lda},
      {"C8 paraphrase baseline contrast", c8_paraphrase},
      {"C9 evaluate determinism", c9_determinism},
      {"C10 single-score performance", c10_performance},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << " (" << o.detail << ")\n";
    failures += o.pass ? 0 : 1;
  }
  std::cout << (10 - failures) << "/10 criteria passed\n";
  return failures == 0 ? 0 : 1;
}
