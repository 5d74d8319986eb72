// tsm: honeyfile enticement scoring from the command line.
//
//   tsm score    --honeyfile F --context DIR --embeddings V
//   tsm topics   --context DIR
//   tsm generate --mode lorem|substitution --template PATH [--source DIR] --out-dir D
//   tsm evaluate --honeyfile DIR --context DIR --embeddings V --out-dir D
//
// Exit status: 0 success, 1 input/configuration error, 2 scoring error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsm/report.hpp"
#include "tsm/tsm.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  // inputs
  std::string honeyfile;
  std::string context;
  std::string embeddings;
  std::string stopwords;
  std::string lemmas;
  bool no_entity_filter = false;
  // scoring
  std::string policy = "threshold";
  double delta = 0.9;
  double top_fraction = 0.005;
  std::string measure = "tsm";
  // topics
  std::string extractor = "lda";
  int topics = 5;
  int words_per_topic = 10;
  std::size_t topk = 50;
  int iterations = 1000;
  double alpha = 0.1;
  double beta = 0.01;
  bool multiset = false;
  // generation
  std::string mode = "substitution";
  std::string template_path;
  std::string source;
  int count = 1;
  // evaluation
  std::size_t context_size = 10;
  std::string ordering = "date";
  std::string sweep;
  std::string sweep_values;
  unsigned jobs = 1;
  std::string out_dir;
  std::uint64_t seed = 42;
};

tsm::Preprocessor make_preprocessor(const Options& o) {
  tsm::PrepConfig cfg;
  cfg.stopword_path = o.stopwords;
  cfg.lemma_table_path = o.lemmas;
  cfg.entity_filter = !o.no_entity_filter;
  return tsm::Preprocessor(cfg);
}

tsm::AggregationPolicy make_policy(const Options& o) {
  tsm::AggregationPolicy p;
  if (o.policy == "average") {
    p = tsm::Average{};
  } else if (o.policy == "threshold") {
    p = tsm::Threshold{o.delta};
  } else if (o.policy == "topfrac") {
    p = tsm::TopFraction{o.top_fraction};
  } else {
    throw tsm::ConfigError("unknown policy '" + o.policy + "'");
  }
  tsm::validate(p);
  return p;
}

tsm::ExtractorSpec make_extractor_spec(const Options& o) {
  tsm::ExtractorSpec spec;
  spec.kind = o.extractor;
  spec.lda.num_topics = o.topics;
  spec.lda.words_per_topic = o.words_per_topic;
  spec.lda.alpha = o.alpha;
  spec.lda.beta = o.beta;
  spec.lda.gibbs_iterations = o.iterations;
  spec.lda.seed = o.seed;
  spec.lda.multiset_documents = o.multiset;
  spec.topk = o.topk;
  spec.lda.validate();
  return spec;
}

tsm::EmbeddingTable require_embeddings(const Options& o) {
  if (o.embeddings.empty()) {
    throw tsm::ConfigError("no embeddings: pass --embeddings or set TSM_EMBEDDINGS");
  }
  return tsm::load_embeddings(o.embeddings);
}

std::vector<tsm::RawDocument> load_documents(const std::string& path) {
  if (path.empty()) throw tsm::InputError("missing input path");
  if (fs::is_regular_file(path)) return {tsm::load_document(path)};
  auto docs = tsm::load_corpus(path);
  if (docs.empty()) throw tsm::InputError("no .txt files in " + path);
  return docs;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tsm::InputError("cannot write " + path.string());
  return out;
}

fs::path require_out_dir(const Options& o) {
  if (o.out_dir.empty()) throw tsm::InputError("--out-dir is required");
  fs::create_directories(o.out_dir);
  return o.out_dir;
}

int run_score(const Options& o) {
  if (o.honeyfile.empty()) throw tsm::InputError("--honeyfile is required");
  if (o.context.empty()) throw tsm::InputError("--context is required");
  const auto prep = make_preprocessor(o);
  const auto table = require_embeddings(o);
  const auto honeyfile = tsm::load_document(o.honeyfile);
  const auto context = load_documents(o.context);

  nlohmann::ordered_json out;
  if (o.measure == "tsm") {
    const auto extractor = tsm::make_extractor(make_extractor_spec(o));
    out = tsm::to_json(
        tsm::tsm_score(honeyfile, context, prep, *extractor, table, make_policy(o)));
    out["extractor"] = make_extractor_spec(o).label();
  } else {
    const auto h = prep.prepare(honeyfile);
    const auto ctx = tsm::preprocess_all(context, prep);
    if (o.measure == "common-words") {
      out = tsm::to_json(tsm::common_word_count(h, ctx, false));
    } else if (o.measure == "common-words-normalized") {
      out = tsm::to_json(tsm::common_word_count(h, ctx, true));
    } else if (o.measure == "mean-vector") {
      out = tsm::to_json(tsm::mean_vector_similarity(h, ctx, table));
    } else {
      throw tsm::ConfigError("unknown measure '" + o.measure + "'");
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_topics(const Options& o) {
  if (o.context.empty()) throw tsm::InputError("--context is required");
  const auto prep = make_preprocessor(o);
  const auto context = tsm::preprocess_all(load_documents(o.context), prep);
  const auto extractor = tsm::make_extractor(make_extractor_spec(o));
  const auto topics = extractor->extract(context);
  for (const auto& list : topics.per_topic) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::cout << (i ? "," : "") << list[i];
    }
    std::cout << "\n";
  }
  return 0;
}

int run_generate(const Options& o) {
  if (o.template_path.empty()) throw tsm::InputError("--template is required");
  if (o.count < 1) throw tsm::ConfigError("--count must be >= 1");
  const fs::path out_dir = require_out_dir(o);
  const auto prep = make_preprocessor(o);
  const auto templates = load_documents(o.template_path);

  tsm::GenConfig base;
  if (o.mode == "lorem") {
    base.mode = tsm::GenMode::Lorem;
  } else if (o.mode == "substitution") {
    base.mode = tsm::GenMode::Substitution;
    if (o.source.empty()) throw tsm::InputError("--source is required for substitution");
    base.source_corpus = load_documents(o.source);
  } else {
    throw tsm::ConfigError("unknown mode '" + o.mode + "'");
  }

  auto manifest = open_output(out_dir / "manifest.csv");
  manifest << "filename,mode,template_id,seed\n";
  std::uint64_t salt = 0;
  for (const auto& t : templates) {
    for (int i = 0; i < o.count; ++i) {
      tsm::GenConfig cfg = base;
      cfg.template_doc = t;
      cfg.seed = base.mode == tsm::GenMode::Lorem ? 0 : tsm::mix_seed(o.seed, salt++);
      const auto doc = tsm::generate(cfg, prep.stopwords());
      std::string name = doc.id;
      if (o.count > 1) name += "-" + std::to_string(i);
      name += ".txt";
      open_output(out_dir / name) << doc.text;
      manifest << tsm::csv_field(name) << ',' << tsm::mode_name(cfg.mode) << ','
               << tsm::csv_field(t.id) << ',' << cfg.seed << '\n';
    }
  }
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = tsm::detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_result(const tsm::EvalResult& r, const fs::path& dir, const std::string& suffix) {
  auto m = open_output(dir / ("matrix" + suffix + ".csv"));
  tsm::write_matrix_csv(r.matrix, m);
  auto p = open_output(dir / ("pairs" + suffix + ".csv"));
  tsm::write_pairs_csv(r, p);
}

void report_failures(const tsm::EvalResult& r) {
  if (r.failed_pairs > 0) {
    std::cerr << "warning: " << r.failed_pairs << " of " << r.pairs.size()
              << " pairs could not be scored (see the error column)\n";
  }
}

int run_evaluate(const Options& o) {
  if (o.honeyfile.empty()) throw tsm::InputError("--honeyfile is required");
  if (o.context.empty()) throw tsm::InputError("--context is required");
  const fs::path out_dir = require_out_dir(o);
  const auto prep = make_preprocessor(o);
  const auto table = require_embeddings(o);
  const auto honeyfiles = tsm::load_corpus(o.honeyfile);
  const auto corpus = tsm::load_corpus(o.context);

  tsm::EvalConfig cfg;
  cfg.policy = make_policy(o);
  cfg.extractor = make_extractor_spec(o);
  cfg.context_size = o.context_size;
  cfg.ordering = tsm::parse_ordering(o.ordering);
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;

  nlohmann::ordered_json meta;
  meta["embeddings"] = fs::path(o.embeddings).filename().string();
  meta["embedding_dimension"] = table.dimension();
  meta["embedding_words"] = table.size();
  meta["stopwords"] = o.stopwords.empty() ? "builtin" : fs::path(o.stopwords).filename().string();
  meta["lemmas"] = o.lemmas.empty() ? "none" : fs::path(o.lemmas).filename().string();
  meta["entity_filter"] = !o.no_entity_filter;

  if (o.sweep.empty()) {
    const auto contexts =
        tsm::build_local_contexts(corpus, cfg.context_size, cfg.ordering, cfg.seed);
    const auto r = tsm::cross_evaluate(honeyfiles, contexts, prep, table, cfg);
    write_result(r, out_dir, "");
    meta["run"] = tsm::run_metadata(r);
    report_failures(r);
  } else {
    const auto param = tsm::parse_sweep_parameter(o.sweep);
    const auto values = split_list(o.sweep_values);
    const auto results = tsm::sweep(honeyfiles, corpus, prep, table, cfg, param, values);
    meta["sweep"] = tsm::sweep_parameter_name(param);
    meta["runs"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const std::string suffix = "_" + tsm::sweep_parameter_name(param) + "_" + values[i];
      write_result(results[i], out_dir, suffix);
      auto run = tsm::run_metadata(results[i]);
      run["value"] = values[i];
      meta["runs"].push_back(run);
      report_failures(results[i]);
    }
  }
  open_output(out_dir / "run.json") << meta.dump(2) << "\n";
  return 0;
}

void add_prep_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--stopwords", o.stopwords, "Stopword file (default: built-in English list)");
  cmd->add_option("--lemmas", o.lemmas, "Lemma table, surface<TAB>lemma (default: none)");
  cmd->add_flag("--no-entity-filter", o.no_entity_filter, "Keep capitalized name-like tokens");
}

void add_topic_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--extractor", o.extractor, "Topic extractor")
      ->check(CLI::IsMember({"lda", "topk"}))
      ->capture_default_str();
  cmd->add_option("--topics", o.topics, "LDA topics")->capture_default_str();
  cmd->add_option("--words-per-topic", o.words_per_topic, "Words kept per LDA topic")
      ->capture_default_str();
  cmd->add_option("--topk", o.topk, "Words kept by the top-k extractor")->capture_default_str();
  cmd->add_option("--iterations", o.iterations, "Gibbs sweeps")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "LDA document-topic prior")->capture_default_str();
  cmd->add_option("--beta", o.beta, "LDA topic-word prior")->capture_default_str();
  cmd->add_flag("--multiset", o.multiset, "Fit LDA on token sequences instead of word sets");
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

void add_scoring_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--embeddings", o.embeddings, "Word vector file")->envname("TSM_EMBEDDINGS");
  cmd->add_option("--policy", o.policy, "Aggregation policy")
      ->check(CLI::IsMember({"average", "threshold", "topfrac"}))
      ->capture_default_str();
  cmd->add_option("--delta", o.delta, "Similarity threshold")->capture_default_str();
  cmd->add_option("--top-fraction", o.top_fraction, "Fraction of top similarities")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Honeyfile enticement scoring by topic semantic matching"};
  app.require_subcommand(1);
  Options o;

  auto* score = app.add_subcommand("score", "Score one honeyfile against a local context");
  score->add_option("--honeyfile", o.honeyfile, "Honeyfile (.txt)");
  score->add_option("--context", o.context, "Directory of context .txt files");
  score->add_option("--measure", o.measure, "Measure to report")
      ->check(CLI::IsMember({"tsm", "common-words", "common-words-normalized", "mean-vector"}))
      ->capture_default_str();
  add_scoring_options(score, o);
  add_prep_options(score, o);
  add_topic_options(score, o);

  auto* topics = app.add_subcommand("topics", "List the topic words of a local context");
  topics->add_option("--context", o.context, "Directory of context .txt files");
  add_prep_options(topics, o);
  add_topic_options(topics, o);

  auto* generate = app.add_subcommand("generate", "Generate honeyfiles from templates");
  generate->add_option("--mode", o.mode, "Generation mode")
      ->check(CLI::IsMember({"lorem", "substitution"}))
      ->capture_default_str();
  generate->add_option("--template", o.template_path, "Template file or directory");
  generate->add_option("--source", o.source, "Source corpus directory (substitution)");
  generate->add_option("--count", o.count, "Honeyfiles per template")->capture_default_str();
  generate->add_option("--out-dir", o.out_dir, "Output directory");
  generate->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  add_prep_options(generate, o);

  auto* evaluate = app.add_subcommand("evaluate", "Cross-category evaluation");
  evaluate->add_option("--honeyfile", o.honeyfile, "Honeyfile directory (category subdirs)");
  evaluate->add_option("--context", o.context, "Corpus directory (category subdirs)");
  evaluate->add_option("--context-size", o.context_size, "Files per local context")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--ordering", o.ordering, "Context file ordering")
      ->check(CLI::IsMember({"date", "random"}))
      ->capture_default_str();
  evaluate->add_option("--sweep", o.sweep, "Parameter to sweep")
      ->check(CLI::IsMember({"delta", "top_fraction", "context_size", "extractor"}));
  evaluate->add_option("--values", o.sweep_values, "Comma-separated sweep values");
  evaluate->add_option("--jobs", o.jobs, "Concurrent pair scorings")->capture_default_str();
  evaluate->add_option("--out-dir", o.out_dir, "Output directory");
  add_scoring_options(evaluate, o);
  add_prep_options(evaluate, o);
  add_topic_options(evaluate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*score) return run_score(o);
    if (*topics) return run_topics(o);
    if (*generate) return run_generate(o);
    if (*evaluate) {
      if (!o.sweep.empty() && o.sweep_values.empty()) {
        throw tsm::ConfigError("--sweep needs --values");
      }
      return run_evaluate(o);
    }
  } catch (const tsm::ScoringError& e) {
    std::cerr << "scoring error: " << e.what() << "\n";
    return 2;
  } catch (const tsm::Error& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
