// Writes the synthesized evaluation corpus shipped under data/synth:
// three topical categories of plain-text documents, substitution and Lorem
// Ipsum honeyfiles generated from them, an embedding table in which each
// category's words cluster around one direction, a stopword list and a
// lemma table for the inflected forms used in the documents.
//
// Output is a pure function of --seed.

#include <CLI11.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tsm/corpus.hpp"
#include "tsm/embedding.hpp"
#include "tsm/genfiles.hpp"
#include "tsm/rng.hpp"
#include "tsm/textprep.hpp"

namespace fs = std::filesystem;

namespace {

struct Category {
  std::string name;
  std::vector<std::string> words;
};

const std::vector<Category> kCategories = {
    {"plants",
     {"leaf", "root", "stem", "seed", "flower", "soil", "photosynthesis",
      "chlorophyll", "herb", "shrub", "botany", "pollen", "germination",
      "foliage", "nutrient", "irrigation", "fertilizer", "petal", "seedling",
      "crop", "harvest", "cultivar", "biomass", "moss", "fern", "grass", "tree",
      "bark", "sap", "xylem", "phloem", "stoma", "herbarium", "weed", "sprout",
      "bloom", "orchard", "vegetation", "legume", "pollinator"}},
    {"theater",
     {"stage", "actor", "actress", "audience", "playwright", "drama",
      "rehearsal", "costume", "scene", "director", "script", "performance",
      "curtain", "comedy", "tragedy", "theatre", "ensemble", "monologue",
      "dialogue", "spectator", "premiere", "choreography", "repertoire",
      "dramaturgy", "puppet", "mime", "opera", "musical", "audition",
      "backstage", "protagonist", "chorus", "applause", "stagecraft",
      "improvisation", "proscenium", "ballet", "cast", "understudy", "playhouse"}},
    {"architecture",
     {"processor", "cache", "memory", "pipeline", "instruction", "register",
      "compiler", "bandwidth", "latency", "throughput", "core", "multicore",
      "microarchitecture", "branch", "predictor", "superscalar", "vector",
      "simd", "gpu", "cpu", "bus", "interconnect", "dram", "transistor",
      "clock", "frequency", "power", "thread", "scheduler", "prefetcher",
      "coherence", "isa", "risc", "accelerator", "fpga", "hardware",
      "benchmark", "workload", "datapath", "opcode"}}};

const std::vector<std::string> kGeneralWords = {
    "study", "result", "method", "analysis", "data", "approach", "research",
    "paper", "model", "evaluation", "experiment", "table", "figure", "section",
    "work", "effect", "value", "process", "system", "level", "group", "number",
    "case", "example", "increase"};

const std::vector<std::string> kFunctionWords = {
    "the", "of", "and", "in", "to", "is", "for", "with", "on", "that", "by",
    "this", "are", "was", "as", "from", "these", "which", "their", "between"};

const std::vector<std::string> kNames = {
    "Okafor", "Lindqvist", "Haruki", "Moreau", "Castellanos", "Novak",
    "Adeyemi", "Kowalski"};

const std::vector<std::string> kPlaces = {
    "New Zealand", "South Australia", "Western Cape", "Hong Kong"};

std::string plural(const std::string& w) {
  if (w == "leaf") return "leaves";
  if (w == "stoma") return "stomata";
  if (w == "data") return w;
  auto ends = [&](const char* s) {
    const std::string suf(s);
    return w.size() >= suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("sis")) return w.substr(0, w.size() - 2) + "es";
  if (ends("s") || ends("x") || ends("ch") || ends("sh")) return w + "es";
  if (ends("y") && w.size() > 1 && std::string("aeiou").find(w[w.size() - 2]) == std::string::npos) {
    return w.substr(0, w.size() - 1) + "ies";
  }
  return w + "s";
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
  return w;
}

// Draws index i with probability proportional to 1 / (i + 3).
std::size_t zipf_index(tsm::Rng& rng, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += 1.0 / static_cast<double>(i + 3);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < n; ++i) {
    u -= 1.0 / static_cast<double>(i + 3);
    if (u < 0.0) return i;
  }
  return n - 1;
}

std::string make_document(const Category& cat, tsm::Rng& rng) {
  std::string text;
  const std::size_t sentences = 10 + rng.below(6);
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t len = 8 + rng.below(7);
    std::string sentence;
    for (std::size_t i = 0; i < len; ++i) {
      std::string word;
      const double u = rng.uniform();
      if (i > 0 && u < 0.33) {
        word = kFunctionWords[rng.below(kFunctionWords.size())];
      } else if (i > 0 && u < 0.36) {
        word = rng.uniform() < 0.7 ? kNames[rng.below(kNames.size())]
                                   : kPlaces[rng.below(kPlaces.size())];
      } else if (rng.uniform() < 0.75) {
        word = cat.words[zipf_index(rng, cat.words.size())];
        if (rng.uniform() < 0.25) word = plural(word);
      } else {
        word = kGeneralWords[rng.below(kGeneralWords.size())];
        if (rng.uniform() < 0.2) word = plural(word);
      }
      if (i == 0) word = capitalize(word);
      if (!sentence.empty()) sentence += (i > 2 && rng.uniform() < 0.06) ? ", " : " ";
      sentence += word;
    }
    if (rng.uniform() < 0.1) sentence += " in " + std::to_string(1990 + rng.below(35));
    text += sentence + ".";
    text += (s + 1) % 4 == 0 ? "\n\n" : " ";
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\n')) text.pop_back();
  return text + "\n";
}

Eigen::VectorXd gaussian(tsm::Rng& rng, std::size_t dim) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return v;
}

// Removes the components along the (orthonormal) directions in `basis`.
Eigen::VectorXd orthogonalize(Eigen::VectorXd v, const std::vector<Eigen::VectorXd>& basis) {
  for (const auto& b : basis) v -= v.dot(b) * b;
  return v;
}

void add(tsm::EmbeddingTable& table, const std::string& word, const Eigen::VectorXd& v) {
  std::vector<double> rounded(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    rounded[static_cast<std::size_t>(i)] = std::round(v[i] * 1e6) / 1e6;
  }
  table.add(word, rounded);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the synthesized TSM evaluation corpus"};
  std::string out_dir = "data";
  std::uint64_t seed = 20240229;
  std::size_t docs_per_category = 40;
  std::size_t honeyfiles_per_category = 8;
  std::size_t lorem_per_category = 2;
  std::size_t dimension = 32;
  app.add_option("--out-dir", out_dir, "Root data directory")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--docs", docs_per_category, "Documents per category")->capture_default_str();
  app.add_option("--honeyfiles", honeyfiles_per_category,
                 "Substitution honeyfiles per category")->capture_default_str();
  app.add_option("--lorem", lorem_per_category, "Lorem honeyfiles per category")->capture_default_str();
  app.add_option("--dim", dimension, "Embedding dimension")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out_dir);
  const fs::path synth = root / "synth";
  fs::remove_all(synth / "corpus");
  fs::remove_all(synth / "honeyfiles");

  // Stopwords and lemmas.
  {
    std::string s = "# English stopwords, one per line\n";
    std::set<std::string> sorted;
    for (auto w : tsm::kBuiltinStopwords) sorted.emplace(w);
    for (const auto& w : sorted) s += w + "\n";
    write_file(root / "stopwords_en.txt", s);
  }
  std::map<std::string, std::string> lemmas;
  for (const auto& cat : kCategories) {
    for (const auto& w : cat.words) lemmas[plural(w)] = w;
  }
  for (const auto& w : kGeneralWords) lemmas[plural(w)] = w;
  {
    std::string s;
    for (const auto& [surface, lemma] : lemmas) {
      if (surface != lemma) s += surface + "\t" + lemma + "\n";
    }
    write_file(root / "lemmas_en.tsv", s);
  }

  // Documents.
  tsm::Rng doc_rng(tsm::mix_seed(seed, 1));
  std::vector<tsm::RawDocument> corpus;
  for (const auto& cat : kCategories) {
    for (std::size_t i = 0; i < docs_per_category; ++i) {
      char id[64];
      std::snprintf(id, sizeof id, "%s-%03zu", cat.name.c_str(), i + 1);
      tsm::RawDocument doc{id, make_document(cat, doc_rng), cat.name};
      write_file(synth / "corpus" / cat.name / (doc.id + ".txt"), doc.text);
      corpus.push_back(std::move(doc));
    }
  }

  // Honeyfiles.
  const auto stopwords = tsm::builtin_stopwords();
  const auto groups = tsm::group_by_category(corpus);
  std::string manifest = "filename,mode,template_id,seed\n";
  std::uint64_t salt = 100;
  for (const auto& [category, docs] : groups) {
    for (std::size_t i = 0; i < honeyfiles_per_category && i < docs.size(); ++i) {
      tsm::GenConfig cfg;
      cfg.mode = tsm::GenMode::Substitution;
      cfg.template_doc = docs[i];
      cfg.source_corpus = docs;
      cfg.seed = tsm::mix_seed(seed, salt++);
      const auto hf = tsm::generate(cfg, stopwords);
      const fs::path rel = fs::path(category) / (hf.id + ".txt");
      write_file(synth / "honeyfiles" / rel, hf.text);
      manifest += rel.generic_string() + ",substitution," + docs[i].id + "," +
                  std::to_string(cfg.seed) + "\n";
    }
    for (std::size_t i = 0; i < lorem_per_category && i < docs.size(); ++i) {
      tsm::GenConfig cfg;
      cfg.mode = tsm::GenMode::Lorem;
      cfg.template_doc = docs[docs.size() - 1 - i];
      cfg.seed = 0;
      const auto hf = tsm::generate(cfg, stopwords);
      const fs::path rel = fs::path("lorem") / (hf.id + ".txt");
      write_file(synth / "honeyfiles" / rel, hf.text);
      manifest += rel.generic_string() + ",lorem," + cfg.template_doc.id + ",0\n";
    }
  }
  write_file(synth / "honeyfiles" / "manifest.csv", manifest);

  // Embeddings: orthonormal category centroids; topical words are the
  // centroid plus scaled Gaussian noise; general and Lorem Ipsum words are
  // random directions orthogonal to every centroid.
  tsm::Rng vec_rng(tsm::mix_seed(seed, 2));
  std::vector<Eigen::VectorXd> centroids;
  for (std::size_t c = 0; c < kCategories.size(); ++c) {
    Eigen::VectorXd v = orthogonalize(gaussian(vec_rng, dimension), centroids);
    centroids.push_back(v.normalized());
  }
  tsm::EmbeddingTable table(dimension);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));
  for (std::size_t c = 0; c < kCategories.size(); ++c) {
    for (const auto& w : kCategories[c].words) {
      const double sigma = 0.2 + 0.15 * vec_rng.uniform();
      const Eigen::VectorXd v = centroids[c] + sigma * scale * gaussian(vec_rng, dimension);
      add(table, w, v);
      const Eigen::VectorXd inflected = v + 0.05 * scale * gaussian(vec_rng, dimension);
      add(table, plural(w), inflected);
    }
  }
  std::vector<std::string> loose(kGeneralWords);
  for (const auto& w : kGeneralWords) loose.push_back(plural(w));
  for (auto w : tsm::kLoremIpsum) loose.emplace_back(w);
  for (const auto& w : loose) {
    if (table.contains(w)) continue;
    add(table, w, orthogonalize(gaussian(vec_rng, dimension), centroids).normalized());
  }
  tsm::save_embeddings(table, synth / "embeddings.txt");

  std::cout << "wrote " << corpus.size() << " documents, " << table.size()
            << " vectors to " << synth.string() << "\n";
  return 0;
}
