#pragma once

// Test-only reference computations. These deliberately avoid the library's
// matrix path, sorting helpers and embed_set so they can check them.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace oracle {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rescaled cosine straight from the definition.
inline double similarity(const Vec& x, const Vec& y) {
  const double c = dot(x, y) / (std::sqrt(dot(x, x)) * std::sqrt(dot(y, y)));
  return (std::fmax(-1.0, std::fmin(1.0, c)) + 1.0) / 2.0;
}

// Pairwise double loop over raw (unnormalized) vectors.
inline std::vector<std::vector<double>> similarity_loop(const std::vector<Vec>& h,
                                                        const std::vector<Vec>& t) {
  std::vector<std::vector<double>> s(h.size(), std::vector<double>(t.size()));
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) s[i][j] = similarity(h[i], t[j]);
  }
  return s;
}

// Threshold aggregation written out as in the pseudo-code.
inline double threshold_score(const std::vector<std::vector<double>>& s, double delta) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : s) {
    for (double v : row) {
      ++n;
      if (v >= delta) sum += v;
    }
  }
  return sum / static_cast<double>(n);
}

inline double average_score(const std::vector<std::vector<double>>& s) {
  return threshold_score(s, -1.0);
}

// Document frequency by brute force: for every candidate word, scan every
// document.
inline std::map<std::string, int> document_frequency(
    const std::vector<std::vector<std::string>>& docs) {
  std::set<std::string> vocab;
  for (const auto& d : docs) vocab.insert(d.begin(), d.end());
  std::map<std::string, int> df;
  for (const auto& w : vocab) {
    for (const auto& d : docs) {
      for (const auto& x : d) {
        if (x == w) {
          ++df[w];
          break;
        }
      }
    }
  }
  return df;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal CSV splitter for files without quoted fields.
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command capturing stdout and stderr into temp files.
inline CommandResult run(const std::string& cmd, const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  const std::string full = cmd + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(full.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

}  // namespace oracle

#include "tsm/rng.hpp"
#include "tsm/textprep.hpp"

namespace oracle {

// Two disjoint 10-word vocabularies; document i draws a random 6-9 word
// subset of vocabulary i % 2.
struct TwoTopicCorpus {
  std::vector<std::string> vocab_a;
  std::vector<std::string> vocab_b;
  std::vector<tsm::PreparedDocument> docs;
};

inline TwoTopicCorpus two_topic_corpus(std::size_t n_docs, std::uint64_t seed) {
  TwoTopicCorpus c;
  c.vocab_a = {"apple", "banana", "cherry", "grape", "lemon",
               "mango", "melon", "peach", "pear", "plum"};
  c.vocab_b = {"anvil", "bolt", "chisel", "drill", "file",
               "hammer", "lathe", "nail", "saw", "wrench"};
  tsm::Rng rng(seed);
  for (std::size_t i = 0; i < n_docs; ++i) {
    std::vector<std::string> pool = (i % 2 == 0) ? c.vocab_a : c.vocab_b;
    rng.shuffle(std::span<std::string>(pool));
    pool.resize(6 + rng.below(4));
    tsm::PreparedDocument d;
    d.id = "doc" + std::to_string(i);
    d.words = pool;
    d.tokens = pool;
    c.docs.push_back(std::move(d));
  }
  return c;
}

// Fraction of listed words that belong to their topic's majority vocabulary.
inline double purity(const std::vector<std::vector<std::string>>& per_topic,
                     const std::vector<std::string>& vocab_a) {
  const std::set<std::string> a(vocab_a.begin(), vocab_a.end());
  std::size_t majority = 0;
  std::size_t total = 0;
  for (const auto& list : per_topic) {
    std::size_t in_a = 0;
    for (const auto& w : list) in_a += a.count(w);
    majority += std::max(in_a, list.size() - in_a);
    total += list.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(majority) / static_cast<double>(total);
}

}  // namespace oracle
