#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsm/baselines.hpp"
#include "tsm/scoring.hpp"

using tsm::PreparedDocument;
using Words = std::vector<std::string>;

namespace {

PreparedDocument doc(const Words& words) {
  PreparedDocument d;
  d.id = "d";
  d.words = words;
  d.tokens = words;
  return d;
}

// Synonym pairs share one axis with cosine 0.8; different concepts are
// orthogonal.
tsm::EmbeddingTable paraphrase_table() {
  const std::vector<std::pair<std::string, std::string>> concepts = {
      {"doctor", "physician"}, {"examine", "check"}, {"sick", "ill"},
      {"patient", ""},         {"yesterday", ""}};
  tsm::EmbeddingTable t(2 * concepts.size());
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    std::vector<double> a(2 * concepts.size(), 0.0);
    a[2 * c] = 1.0;
    t.add(concepts[c].first, a);
    if (concepts[c].second.empty()) continue;
    std::vector<double> b(2 * concepts.size(), 0.0);
    b[2 * c] = 0.8;
    b[2 * c + 1] = 0.6;
    t.add(concepts[c].second, b);
  }
  return t;
}

}  // namespace

TEST(CommonWords, CountsSharedWords) {
  const std::vector<PreparedDocument> ctx{doc({"plant", "soil"})};
  EXPECT_EQ(tsm::common_word_count(doc({"plant", "grow"}), ctx, false).value, 1.0);
  EXPECT_EQ(tsm::common_word_count(doc({"plant", "grow"}), ctx, true).value, 0.5);
  EXPECT_EQ(tsm::common_word_count(doc({"opera"}), ctx, false).value, 0.0);
  EXPECT_EQ(tsm::common_word_count(doc({"plant", "grow"}), ctx, false).matched,
            (Words{"plant"}));
}

TEST(CommonWords, UnionOverContextFiles) {
  const std::vector<PreparedDocument> ctx{doc({"aa"}), doc({"bb"}), doc({"aa", "cc"})};
  EXPECT_EQ(tsm::common_word_count(doc({"aa", "bb", "dd"}), ctx, false).value, 2.0);
}

TEST(CommonWords, Errors) {
  const std::vector<PreparedDocument> ctx{doc({"plant"})};
  EXPECT_THROW(tsm::common_word_count(doc({}), ctx, true), tsm::ScoringError);
  EXPECT_EQ(tsm::common_word_count(doc({}), ctx, false).value, 0.0);
  EXPECT_THROW(tsm::common_word_count(doc({"plant"}), {}, false), tsm::InputError);
}

TEST(MeanVector, UnitCases) {
  tsm::EmbeddingTable t(2);
  t.add("aa", std::vector<double>{1, 0});
  t.add("bb", std::vector<double>{0, 1});
  t.add("cc", std::vector<double>{-1, 0});
  const std::vector<PreparedDocument> ctx_a{doc({"aa"})};
  const std::vector<PreparedDocument> ctx_b{doc({"bb"})};
  EXPECT_NEAR(tsm::mean_vector_similarity(doc({"aa"}), ctx_a, t).value, 1.0, 1e-12);
  EXPECT_NEAR(tsm::mean_vector_similarity(doc({"aa"}), ctx_b, t).value, 0.5, 1e-12);
  EXPECT_THROW(tsm::mean_vector_similarity(doc({"zz"}), ctx_a, t), tsm::ScoringError);
  // aa and cc cancel.
  EXPECT_THROW(tsm::mean_vector_similarity(doc({"aa", "cc"}), ctx_a, t), tsm::ScoringError);
}

TEST(MeanVector, MatchesLoopOracleAndInvariants) {
  tsm::Rng rng(61);
  tsm::EmbeddingTable t(8);
  std::vector<oracle::Vec> vecs;
  Words vocab;
  for (int i = 0; i < 40; ++i) {
    oracle::Vec v(8);
    for (auto& x : v) x = rng.normal() * (0.5 + rng.uniform());
    vocab.push_back("w" + std::to_string(i));
    vecs.push_back(v);
    t.add(vocab.back(), v);
  }
  auto mean_of = [&](const std::vector<std::size_t>& ids) {
    oracle::Vec m(8, 0.0);
    for (auto id : ids) {
      const double n = std::sqrt(oracle::dot(vecs[id], vecs[id]));
      for (std::size_t k = 0; k < 8; ++k) m[k] += vecs[id][k] / n;
    }
    return m;
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> hid, c1, c2;
    for (int i = 0; i < 5; ++i) hid.push_back(rng.below(40));
    for (int i = 0; i < 6; ++i) c1.push_back(rng.below(40));
    for (int i = 0; i < 6; ++i) c2.push_back(rng.below(40));
    std::sort(hid.begin(), hid.end());
    hid.erase(std::unique(hid.begin(), hid.end()), hid.end());
    auto words = [&](const std::vector<std::size_t>& ids) {
      Words w;
      for (auto id : ids) w.push_back(vocab[id]);
      return w;
    };
    std::vector<std::size_t> all = c1;
    all.insert(all.end(), c2.begin(), c2.end());
    const double expected = oracle::similarity(mean_of(hid), mean_of(all));
    const std::vector<PreparedDocument> ctx{doc(words(c1)), doc(words(c2))};
    const double got = tsm::mean_vector_similarity(doc(words(hid)), ctx, t).value;
    EXPECT_NEAR(got, expected, 1e-9);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
    const std::vector<PreparedDocument> swapped{doc(words(c2)), doc(words(c1))};
    EXPECT_NEAR(tsm::mean_vector_similarity(doc(words(hid)), swapped, t).value, got, 1e-12);
  }
}

TEST(Paraphrase, SemanticScoreSeesWhatWordCountMisses) {
  const tsm::Preprocessor prep(tsm::builtin_stopwords(),
                               {{"examined", "examine"}, {"checked", "check"}}, true);
  const auto a = prep.prepare({"a", "The doctor examined the sick patient yesterday", ""});
  const auto b = prep.prepare({"b", "Yesterday a physician checked the ill patient", ""});
  EXPECT_EQ(a.words, (Words{"doctor", "examine", "sick", "patient", "yesterday"}));
  EXPECT_EQ(b.words, (Words{"yesterday", "physician", "check", "ill", "patient"}));

  const std::vector<PreparedDocument> ctx{b};
  EXPECT_EQ(tsm::common_word_count(a, ctx, false).value, 2.0);

  const auto table = paraphrase_table();
  const auto s = tsm::similarity_matrix(tsm::embed_set(a.words, table),
                                        tsm::embed_set(b.words, table));
  EXPECT_EQ(s.size(), 25u);
  EXPECT_EQ(tsm::count_at_least(s, 0.75), 5u);
  const double tsm_value = tsm::aggregate(s, tsm::Threshold{0.75});
  EXPECT_NEAR(tsm_value, (3 * 0.9 + 2 * 1.0) / 25.0, 1e-12);
}
