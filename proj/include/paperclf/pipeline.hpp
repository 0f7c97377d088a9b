// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "candidates.hpp"
#include "citegraph.hpp"
#include "common.hpp"
#include "corpus.hpp"
#include "encoder.hpp"
#include "metrics.hpp"
#include "ranker.hpp"
#include "selftrain.hpp"

namespace paperclf {

/// Everything a run needs. Loaded from one JSON file; unknown keys are rejected.
struct PipelineConfig {
  std::string corpus;
  std::string labels;
  std::string output_dir = "out";
  std::string embeddings;  // optional external embedding file

  std::uint64_t seed = 1;
  std::size_t min_paragraph_words = 10;
  std::size_t min_df = 5;

  std::string meta_path = "P->P<-P";
  std::size_t tuples = 2000;

  std::size_t hash_dim = 2048;
  std::size_t embed_dim = 256;
  std::size_t max_tokens = 256;
  TrainingConfig training;

  std::string match_scope = "title_abstract";
  bool use_hierarchy = true;
  bool self_training = true;

  std::size_t pseudo_n = 5;
  std::size_t trees = 3;
  std::size_t max_leaf = 100;
  std::size_t beam = 10;
  LogisticOptions logistic;

  std::size_t top_k = 10;
  MetricsOptions metrics;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["corpus"] = corpus;
    j["labels"] = labels;
    j["output_dir"] = output_dir;
    j["embeddings"] = embeddings;
    j["seed"] = seed;
    j["min_paragraph_words"] = min_paragraph_words;
    j["min_df"] = min_df;
    j["meta_path"] = meta_path;
    j["tuples"] = tuples;
    j["hash_dim"] = hash_dim;
    j["embed_dim"] = embed_dim;
    j["max_tokens"] = max_tokens;
    j["training"] = {{"learning_rate", training.learning_rate}, {"warmup_steps", training.warmup_steps},
                     {"weight_decay", training.weight_decay},   {"beta1", training.beta1},
                     {"beta2", training.beta2},                 {"epsilon", training.epsilon},
                     {"batch_size", training.batch_size},       {"epochs", training.epochs},
                     {"total_steps", training.total_steps}};
    j["match_scope"] = match_scope;
    j["use_hierarchy"] = use_hierarchy;
    j["self_training"] = self_training;
    j["pseudo_n"] = pseudo_n;
    j["trees"] = trees;
    j["max_leaf"] = max_leaf;
    j["beam"] = beam;
    j["classifier"] = {{"epochs", logistic.epochs}, {"l2", logistic.l2}, {"learning_rate", logistic.learning_rate}};
    j["top_k"] = top_k;
    j["metrics"] = {{"precision_k", metrics.precision_k},
                    {"ndcg_k", metrics.ndcg_k},
                    {"psp_k", metrics.psp_k},
                    {"psn_k", metrics.psn_k},
                    {"propensity_a", metrics.propensity.a},
                    {"propensity_b", metrics.propensity.b},
                    {"propensity_log_base", metrics.propensity.log_base}};
    return j;
  }

  static PipelineConfig from_json(const nlohmann::json& j) {
    PipelineConfig c;
    // Start from the defaults so a partial file is valid, then overlay.
    nlohmann::json merged = c.to_json();
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!merged.contains(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
      if (merged[it.key()].is_object()) {
        if (!it.value().is_object()) throw ConfigError("config key '" + it.key() + "' must be an object");
        for (auto in = it.value().begin(); in != it.value().end(); ++in) {
          if (!merged[it.key()].contains(in.key()))
            throw ConfigError("unknown config key '" + it.key() + "." + in.key() + "'");
          merged[it.key()][in.key()] = in.value();
        }
      } else {
        merged[it.key()] = it.value();
      }
    }
    try {
      c.corpus = merged["corpus"];
      c.labels = merged["labels"];
      c.output_dir = merged["output_dir"];
      c.embeddings = merged["embeddings"];
      c.seed = merged["seed"];
      c.min_paragraph_words = merged["min_paragraph_words"];
      c.min_df = merged["min_df"];
      c.meta_path = merged["meta_path"];
      c.tuples = merged["tuples"];
      c.hash_dim = merged["hash_dim"];
      c.embed_dim = merged["embed_dim"];
      c.max_tokens = merged["max_tokens"];
      const auto& t = merged["training"];
      c.training.learning_rate = t["learning_rate"];
      c.training.warmup_steps = t["warmup_steps"];
      c.training.weight_decay = t["weight_decay"];
      c.training.beta1 = t["beta1"];
      c.training.beta2 = t["beta2"];
      c.training.epsilon = t["epsilon"];
      c.training.batch_size = t["batch_size"];
      c.training.epochs = t["epochs"];
      c.training.total_steps = t["total_steps"];
      c.match_scope = merged["match_scope"];
      c.use_hierarchy = merged["use_hierarchy"];
      c.self_training = merged["self_training"];
      c.pseudo_n = merged["pseudo_n"];
      c.trees = merged["trees"];
      c.max_leaf = merged["max_leaf"];
      c.beam = merged["beam"];
      c.logistic.epochs = merged["classifier"]["epochs"];
      c.logistic.l2 = merged["classifier"]["l2"];
      c.logistic.learning_rate = merged["classifier"]["learning_rate"];
      c.top_k = merged["top_k"];
      const auto& m = merged["metrics"];
      c.metrics.precision_k = m["precision_k"].get<std::vector<std::size_t>>();
      c.metrics.ndcg_k = m["ndcg_k"].get<std::vector<std::size_t>>();
      c.metrics.psp_k = m["psp_k"].get<std::vector<std::size_t>>();
      c.metrics.psn_k = m["psn_k"].get<std::vector<std::size_t>>();
      c.metrics.propensity.a = m["propensity_a"];
      c.metrics.propensity.b = m["propensity_b"];
      c.metrics.propensity.log_base = m["propensity_log_base"];
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    return c;
  }

  static PipelineConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
  }

  /// Applies "key=value" or "group.key=value"; the value is parsed as JSON
  /// and falls back to a plain string.
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;
    }
    nlohmann::json patch = nlohmann::json::object();
    if (const auto dot = key.find('.'); dot != std::string::npos)
      patch[key.substr(0, dot)][key.substr(dot + 1)] = value;
    else
      patch[key] = value;
    nlohmann::json cur = to_json();
    for (auto it = patch.begin(); it != patch.end(); ++it) {
      if (it.value().is_object() && cur.contains(it.key()) && cur[it.key()].is_object())
        for (auto in = it.value().begin(); in != it.value().end(); ++in) cur[it.key()][in.key()] = in.value();
      else
        cur[it.key()] = it.value();
    }
    *this = from_json(cur);
  }

  MatchScope scope() const {
    if (match_scope == "title_abstract") return MatchScope::title_abstract;
    if (match_scope == "full_text") return MatchScope::full_text;
    throw ConfigError("match_scope must be 'title_abstract' or 'full_text'");
  }

  /// Checks every field against the preconditions of the stage that uses it.
  void validate() const {
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw ConfigError(what);
    };
    need(!corpus.empty(), "config: 'corpus' path is required");
    need(!labels.empty(), "config: 'labels' path is required");
    need(!output_dir.empty(), "config: 'output_dir' must be nonempty");
    need(min_paragraph_words >= 1, "config: min_paragraph_words must be >= 1");
    need(min_df >= 1, "config: min_df must be >= 1");
    MetaPath::parse(meta_path);
    need(tuples >= 1, "config: tuples must be >= 1");
    need(hash_dim >= 1 && embed_dim >= 1, "config: hash_dim and embed_dim must be >= 1");
    need(max_tokens >= 1, "config: max_tokens must be >= 1");
    need(training.learning_rate >= 0.0, "config: training.learning_rate must be >= 0");
    need(training.weight_decay >= 0.0, "config: training.weight_decay must be >= 0");
    need(training.beta1 >= 0.0 && training.beta1 < 1.0, "config: training.beta1 must be in [0, 1)");
    need(training.beta2 >= 0.0 && training.beta2 < 1.0, "config: training.beta2 must be in [0, 1)");
    need(training.epsilon > 0.0, "config: training.epsilon must be > 0");
    need(training.batch_size >= 1, "config: training.batch_size must be >= 1");
    need(training.epochs >= 1 || training.total_steps >= 1, "config: training needs epochs or total_steps");
    scope();
    need(pseudo_n >= 1, "config: pseudo_n must be >= 1");
    need(trees >= 1, "config: trees must be >= 1");
    need(max_leaf >= 1, "config: max_leaf must be >= 1");
    need(beam >= 1, "config: beam must be >= 1");
    need(logistic.epochs >= 1, "config: classifier.epochs must be >= 1");
    need(logistic.l2 >= 0.0, "config: classifier.l2 must be >= 0");
    need(logistic.learning_rate > 0.0, "config: classifier.learning_rate must be > 0");
    need(top_k >= 1, "config: top_k must be >= 1");
    std::size_t max_k = 0;
    for (const auto* ks : {&metrics.precision_k, &metrics.ndcg_k, &metrics.psp_k, &metrics.psn_k})
      for (auto k : *ks) {
        need(k >= 1, "config: metric k values must be >= 1");
        max_k = std::max(max_k, k);
      }
    need(max_k <= top_k, "config: top_k must cover the largest metric k");
    need(metrics.propensity.a > 0.0 && metrics.propensity.b > 0.0, "config: propensity A and B must be > 0");
    need(metrics.propensity.log_base > 1.0, "config: propensity_log_base must be > 1");
  }

  std::filesystem::path artifact(const std::string& name) const { return std::filesystem::path(output_dir) / name; }

  ScorerModel initial_scorer() const {
    TrainingConfig t = training;
    t.seed = derive_seed(seed, "train-encoder");
    auto m = ScorerModel::initialize(hash_dim, embed_dim, derive_seed(seed, "hash"), derive_seed(seed, "init"), t);
    m.featurizer.max_tokens = max_tokens;
    return m;
  }

  SelfTrainConfig self_train_config() const {
    SelfTrainConfig s;
    s.pseudo_n = pseudo_n;
    s.trees = trees;
    s.max_leaf = max_leaf;
    s.beam = beam;
    s.logistic = logistic;
    s.seed = derive_seed(seed, "self-train");
    return s;
  }
};

/// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr const char* kIngest = "ingest.json";
inline constexpr const char* kCandidates = "candidates.jsonl";
inline constexpr const char* kTuples = "tuples.jsonl";
inline constexpr const char* kScorer = "scorer.bin";
inline constexpr const char* kTrainLog = "train_log.json";
inline constexpr const char* kScores = "scores.jsonl";
inline constexpr const char* kScoreStats = "score_stats.json";
inline constexpr const char* kClassifier = "classifier.json";
inline constexpr const char* kPredictions = "predictions.jsonl";
inline constexpr const char* kMetrics = "metrics.json";
}  // namespace artifacts

/// Wraps any failure with the name of the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Parsed inputs shared by all stages of one process.
struct PipelineInputs {
  Corpus corpus;
  LabelSpace labels;

  static PipelineInputs load(const PipelineConfig& cfg) {
    return {load_corpus(cfg.corpus, cfg.min_paragraph_words), load_labels(cfg.labels)};
  }
};

namespace detail {

inline std::ofstream open_artifact(const std::filesystem::path& p) {
  std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

inline std::ifstream read_artifact(const std::filesystem::path& p, const char* producer) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing artifact " + p.string() + " (run '" + producer + "' first)");
  return in;
}

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

struct IngestStats {
  CorpusStats corpus;
  std::size_t labels = 0;
  std::size_t edges = 0;
  std::size_t dangling_refs = 0;
  std::size_t self_loops = 0;
  std::size_t vocabulary = 0;
};

inline IngestStats stage_ingest(const PipelineConfig& cfg, const PipelineInputs& in) {
  return detail::in_stage("ingest", [&] {
    const auto g = build_graph(in.corpus);
    IngestStats s{in.corpus.stats, in.labels.size(), g.edge_count(), g.dangling_refs, g.self_loops,
                  build_vocabulary(in.corpus.papers, cfg.min_df).size()};
    nlohmann::ordered_json j;
    j["papers"] = s.corpus.papers;
    j["body_paragraphs"] = s.corpus.body_paragraphs;
    j["removed_paragraphs"] = s.corpus.removed_paragraphs;
    j["empty_papers"] = s.corpus.empty_papers;
    j["paragraphs_per_paper"] = s.corpus.paragraphs_per_paper();
    j["labels"] = s.labels;
    j["citation_edges"] = s.edges;
    j["dangling_refs"] = s.dangling_refs;
    j["self_loops"] = s.self_loops;
    j["vocabulary"] = s.vocabulary;
    detail::open_artifact(cfg.artifact(artifacts::kIngest)) << j.dump(2) << '\n';
    return s;
  });
}

inline CandidateStats stage_candidates(const PipelineConfig& cfg, const PipelineInputs& in) {
  return detail::in_stage("candidates", [&] {
    const auto sets = retrieve_all(in.corpus, build_name_index(in.labels), cfg.scope());
    auto out = detail::open_artifact(cfg.artifact(artifacts::kCandidates));
    write_candidates(out, in.corpus, in.labels, sets);
    return candidate_stats(sets);
  });
}

inline std::size_t stage_sample_tuples(const PipelineConfig& cfg, const PipelineInputs& in) {
  return detail::in_stage("sample-tuples", [&] {
    const auto g = build_graph(in.corpus);
    const auto tuples =
        sample_tuples(g, in.corpus, MetaPath::parse(cfg.meta_path), cfg.tuples, derive_seed(cfg.seed, "tuples"));
    auto out = detail::open_artifact(cfg.artifact(artifacts::kTuples));
    write_tuples(out, tuples, in.corpus);
    return tuples.size();
  });
}

inline TrainResult stage_train_encoder(const PipelineConfig& cfg, const PipelineInputs& in, unsigned threads) {
  return detail::in_stage("train-encoder", [&] {
    auto tin = detail::read_artifact(cfg.artifact(artifacts::kTuples), "sample-tuples");
    const auto tuples = read_tuples(tin, in.corpus, cfg.artifact(artifacts::kTuples).string());
    auto model = cfg.initial_scorer();
    auto res = train(model, tuples, in.corpus, threads);
    auto out = detail::open_artifact(cfg.artifact(artifacts::kScorer));
    save_scorer(out, model);
    nlohmann::ordered_json log;
    log["steps"] = res.steps;
    log["loss"] = res.loss_trace;
    detail::open_artifact(cfg.artifact(artifacts::kTrainLog)) << log.dump() << '\n';
    return res;
  });
}

struct ScoreStats {
  std::size_t cross_calls = 0;
  std::size_t bi_calls = 0;
  std::size_t candidates = 0;  // sum of |C(d)|
  std::size_t leaves = 0;      // sum of |P_d|
};

inline ScoreStats stage_score(const PipelineConfig& cfg, const PipelineInputs& in, unsigned threads) {
  return detail::in_stage("score", [&] {
    auto cin = detail::read_artifact(cfg.artifact(artifacts::kCandidates), "candidates");
    const auto sets = read_candidates(cin, in.corpus, in.labels, cfg.artifact(artifacts::kCandidates).string());
    auto sin = detail::read_artifact(cfg.artifact(artifacts::kScorer), "train-encoder");
    const auto model = load_scorer(sin, cfg.artifact(artifacts::kScorer).string());
    std::optional<EmbeddingTable> overrides;
    if (!cfg.embeddings.empty()) overrides = load_embeddings(cfg.embeddings, model.embed_dim);

    InferenceCounters counters;
    const auto scored = score_corpus(model, in.corpus, in.labels, sets, {cfg.use_hierarchy, threads}, &counters,
                                     overrides ? &*overrides : nullptr);
    auto out = detail::open_artifact(cfg.artifact(artifacts::kScores));
    write_scores(out, in.corpus, in.labels, scored);

    ScoreStats s{counters.cross_calls.load(), counters.bi_calls.load(), 0, 0};
    for (std::size_t d = 0; d < in.corpus.size(); ++d) {
      s.candidates += sets[d].size();
      s.leaves += in.corpus.papers[d].leaves().size();
    }
    nlohmann::ordered_json j;
    j["cross_calls"] = s.cross_calls;
    j["bi_calls"] = s.bi_calls;
    j["sum_candidates"] = s.candidates;
    j["sum_leaves"] = s.leaves;
    j["labels"] = in.labels.size();
    detail::open_artifact(cfg.artifact(artifacts::kScoreStats)) << j.dump(2) << '\n';
    return s;
  });
}

inline ScoredCandidates read_scores_artifact(const PipelineConfig& cfg, const PipelineInputs& in) {
  auto sin = detail::read_artifact(cfg.artifact(artifacts::kScores), "score");
  return read_scores(sin, in.corpus, in.labels, cfg.artifact(artifacts::kScores).string());
}

inline std::vector<TfIdfVector> corpus_tfidf(const PipelineConfig& cfg, const Corpus& corpus, std::size_t* dim,
                                             unsigned threads) {
  const auto vocab = build_vocabulary(corpus.papers, cfg.min_df);
  std::vector<TfIdfVector> xs(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t d) { xs[d] = tfidf_vector(corpus.papers[d], vocab); });
  *dim = vocab.size();
  return xs;
}

inline void stage_self_train(const PipelineConfig& cfg, const PipelineInputs& in, unsigned threads) {
  detail::in_stage("self-train", [&] {
    if (!cfg.self_training) throw ConfigError("self_training is disabled in the config");
    const auto scored = read_scores_artifact(cfg, in);
    std::size_t dim = 0;
    const auto xs = corpus_tfidf(cfg, in.corpus, &dim, threads);
    const auto y = pseudo_labels(scored, cfg.pseudo_n);
    const auto clf = train_classifier(xs, y, in.labels.size(), dim, cfg.self_train_config(), threads);
    auto out = detail::open_artifact(cfg.artifact(artifacts::kClassifier));
    save_classifier(out, clf, in.labels);
  });
}

/// Writes {"paper_id", "ranking": [top-k label ids], "top_k_scores": [classifier probabilities]}.
inline std::vector<std::vector<std::size_t>> stage_predict(const PipelineConfig& cfg, const PipelineInputs& in,
                                                           unsigned threads) {
  return detail::in_stage("predict", [&] {
    const auto scored = read_scores_artifact(cfg, in);
    std::vector<LabelProbabilities> probs(in.corpus.size());
    if (cfg.self_training) {
      auto cin = detail::read_artifact(cfg.artifact(artifacts::kClassifier), "self-train");
      const auto clf = load_classifier(cin, in.labels, cfg.artifact(artifacts::kClassifier).string());
      std::size_t dim = 0;
      const auto xs = corpus_tfidf(cfg, in.corpus, &dim, threads);
      if (dim != clf.input_dim) throw Error("classifier input dimension does not match the corpus vocabulary");
      parallel_for(in.corpus.size(), threads, [&](std::size_t d) { probs[d] = predict_proba(clf, xs[d], cfg.beam); });
    }
    std::vector<std::vector<std::size_t>> rankings(in.corpus.size());
    auto out = detail::open_artifact(cfg.artifact(artifacts::kPredictions));
    for (std::size_t d = 0; d < in.corpus.size(); ++d) {
      auto full = final_ranking(scored[d], probs[d], in.labels.size(), cfg.pseudo_n);
      full.resize(std::min(full.size(), cfg.top_k));
      nlohmann::ordered_json ids = nlohmann::ordered_json::array();
      nlohmann::ordered_json sc = nlohmann::ordered_json::array();
      for (auto l : full) {
        ids.push_back(in.labels.labels[l].id);
        auto it = std::lower_bound(probs[d].begin(), probs[d].end(), std::make_pair(l, -1.0));
        sc.push_back(it != probs[d].end() && it->first == l ? it->second : 0.0);
      }
      nlohmann::ordered_json j;
      j["paper_id"] = in.corpus.papers[d].id;
      j["ranking"] = std::move(ids);
      j["top_k_scores"] = std::move(sc);
      out << j.dump() << '\n';
      rankings[d] = std::move(full);
    }
    return rankings;
  });
}

inline std::vector<std::vector<std::size_t>> read_predictions(std::istream& in, const Corpus& corpus,
                                                              const LabelSpace& labels,
                                                              const std::string& path = "<stream>") {
  std::vector<std::vector<std::size_t>> rankings(corpus.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      const auto id = j.at("paper_id").get<std::string>();
      auto it = corpus.by_id.find(id);
      if (it == corpus.by_id.end()) throw LoadError(path, lineno, "unknown paper id '" + id + "'");
      std::vector<std::size_t> r;
      for (const auto& lid : j.at("ranking")) {
        auto idx = labels.index_of(lid.get<std::string>());
        if (!idx) throw LoadError(path, lineno, "unknown label id");
        r.push_back(*idx);
      }
      rankings[it->second] = std::move(r);
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(path, lineno, std::string("bad prediction record: ") + e.what());
    }
  }
  return rankings;
}

inline MetricsReport stage_evaluate(const PipelineConfig& cfg, const PipelineInputs& in) {
  return detail::in_stage("evaluate", [&] {
    bool any_gold = false;
    for (const auto& p : in.corpus.papers) any_gold = any_gold || p.gold_labels.has_value();
    if (!any_gold) throw Error("corpus carries no ground-truth labels");
    auto pin = detail::read_artifact(cfg.artifact(artifacts::kPredictions), "predict");
    const auto rankings = read_predictions(pin, in.corpus, in.labels, cfg.artifact(artifacts::kPredictions).string());
    auto cin = detail::read_artifact(cfg.artifact(artifacts::kCandidates), "candidates");
    const auto sets = read_candidates(cin, in.corpus, in.labels);
    const auto rep = evaluate(rankings, gold_from_corpus(in.corpus, in.labels), in.labels.size(), cfg.metrics,
                              candidate_stats(sets).mean_candidates);
    detail::open_artifact(cfg.artifact(artifacts::kMetrics)) << rep.to_json().dump(2) << '\n';
    return rep;
  });
}

struct RunResult {
  IngestStats ingest;
  CandidateStats candidates;
  ScoreStats score;
  std::optional<MetricsReport> metrics;
};

/// All stages in order, each reading the previous stages' artifacts from the
/// output directory. Metrics are produced when the corpus has ground truth.
inline RunResult run_pipeline(const PipelineConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const auto in = detail::in_stage("ingest", [&] { return PipelineInputs::load(cfg); });
  RunResult r;
  r.ingest = stage_ingest(cfg, in);
  r.candidates = stage_candidates(cfg, in);
  stage_sample_tuples(cfg, in);
  stage_train_encoder(cfg, in, threads);
  r.score = stage_score(cfg, in, threads);
  if (cfg.self_training) stage_self_train(cfg, in, threads);
  stage_predict(cfg, in, threads);
  bool any_gold = false;
  for (const auto& p : in.corpus.papers) any_gold = any_gold || p.gold_labels.has_value();
  if (any_gold) r.metrics = stage_evaluate(cfg, in);
  return r;
}

}  // namespace paperclf
