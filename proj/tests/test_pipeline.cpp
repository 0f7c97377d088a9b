// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"

namespace pc = paperclf;
using testutil::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small planted corpus on disk plus a fast config pointing at it.
pc::PipelineConfig small_setup(const testutil::TempDir& dir, const std::string& out = "out") {
  pc::SyntheticSpec spec;
  spec.papers = 150;
  spec.labels = 15;
  spec.vocabulary = 600;
  spec.citation_probability = 0.1;
  const auto syn = pc::generate_synthetic(spec);
  pc::write_jsonl(dir / "corpus.jsonl", syn.papers);
  pc::write_jsonl(dir / "labels.jsonl", syn.labels);
  pc::PipelineConfig cfg;
  cfg.corpus = dir / "corpus.jsonl";
  cfg.labels = dir / "labels.jsonl";
  cfg.output_dir = dir / out;
  cfg.tuples = 400;
  cfg.hash_dim = 512;
  cfg.embed_dim = 32;
  cfg.training.warmup_steps = 10;
  cfg.min_df = 2;
  cfg.logistic.epochs = 10;
  return cfg;
}

}  // namespace

TEST(Config, DefaultsRoundTripThroughJson) {
  pc::PipelineConfig c;
  c.corpus = "c.jsonl";
  c.labels = "l.jsonl";
  const auto back = pc::PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.meta_path, "P->P<-P");
  EXPECT_EQ(back.pseudo_n, 5u);
  EXPECT_EQ(back.trees, 3u);
  EXPECT_EQ(back.beam, 10u);
  EXPECT_EQ(back.max_leaf, 100u);
  EXPECT_EQ(back.min_paragraph_words, 10u);
  EXPECT_EQ(back.min_df, 5u);
  EXPECT_DOUBLE_EQ(back.training.weight_decay, 0.01);
  EXPECT_EQ(back.training.warmup_steps, 100u);
  EXPECT_NO_THROW(back.validate());
}

TEST(Config, PartialFileOverlaysDefaults) {
  const auto c = pc::PipelineConfig::from_json(json::parse(R"({"corpus":"x","training":{"learning_rate":0.5}})"));
  EXPECT_EQ(c.corpus, "x");
  EXPECT_DOUBLE_EQ(c.training.learning_rate, 0.5);
  EXPECT_EQ(c.training.batch_size, pc::TrainingConfig{}.batch_size);
}

TEST(Config, UnknownKeysAndWrongTypesAreRejected) {
  EXPECT_THROW(pc::PipelineConfig::from_json(json::parse(R"({"corpsu":"x"})")), pc::ConfigError);
  EXPECT_THROW(pc::PipelineConfig::from_json(json::parse(R"({"training":{"lr":1}})")), pc::ConfigError);
  EXPECT_THROW(pc::PipelineConfig::from_json(json::parse(R"({"tuples":"many"})")), pc::ConfigError);
  EXPECT_THROW(pc::PipelineConfig::from_json(json::parse(R"({"training":3})")), pc::ConfigError);
  EXPECT_THROW(pc::PipelineConfig::from_json(json::parse("[1,2]")), pc::ConfigError);
}

TEST(Config, OverridesParseJsonValues) {
  pc::PipelineConfig c;
  c.set("tuples=123");
  c.set("training.learning_rate=0.25");
  c.set("meta_path=P->P");
  c.set("use_hierarchy=false");
  c.set("metrics.precision_k=[1,2]");
  EXPECT_EQ(c.tuples, 123u);
  EXPECT_DOUBLE_EQ(c.training.learning_rate, 0.25);
  EXPECT_EQ(c.meta_path, "P->P");
  EXPECT_FALSE(c.use_hierarchy);
  EXPECT_EQ(c.metrics.precision_k, (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(c.set("nonsense"), pc::ConfigError);
  EXPECT_THROW(c.set("bogus=1"), pc::ConfigError);
  EXPECT_THROW(c.set("training.bogus=1"), pc::ConfigError);
}

TEST(Config, ValidationCatchesBadValues) {
  auto valid = [] {
    pc::PipelineConfig c;
    c.corpus = "c";
    c.labels = "l";
    return c;
  };
  EXPECT_NO_THROW(valid().validate());
  const std::vector<std::string> bad = {"corpus=\"\"",       "min_df=0",          "meta_path=\"P\"",
                                        "tuples=0",           "match_scope=\"x\"", "training.beta1=1.0",
                                        "training.epsilon=0", "beam=0",            "top_k=3",
                                        "classifier.learning_rate=0", "metrics.propensity_log_base=1"};
  for (const auto& b : bad) {
    auto c = valid();
    c.set(b);
    EXPECT_THROW(c.validate(), pc::ConfigError) << b;
  }
}

TEST(Config, LoadFromFile) {
  testutil::TempDir dir("cfgload");
  std::ofstream(dir / "c.json") << R"({"corpus":"a","labels":"b","seed":9})";
  const auto c = pc::PipelineConfig::load(dir / "c.json");
  EXPECT_EQ(c.seed, 9u);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(pc::PipelineConfig::load(dir / "bad.json"), pc::ConfigError);
  EXPECT_THROW(pc::PipelineConfig::load(dir / "missing.json"), pc::ConfigError);
}

TEST(Synthetic, InfeasibleSpecsAreRejected) {
  pc::SyntheticSpec s;
  s.labels_per_paper = s.labels + 1;
  EXPECT_THROW(pc::generate_synthetic(s), pc::ConfigError);
  s = {};
  s.papers = 0;
  EXPECT_THROW(pc::generate_synthetic(s), pc::ConfigError);
  s = {};
  s.full_text_only_fraction = 1.5;
  EXPECT_THROW(pc::generate_synthetic(s), pc::ConfigError);
  s = {};
  s.paragraph_words = 5;
  EXPECT_THROW(pc::generate_synthetic(s), pc::ConfigError);
  EXPECT_THROW(pc::generate_two_cluster(4, 1), pc::ConfigError);
}

TEST(Synthetic, DeterministicAndConsistent) {
  pc::SyntheticSpec s;
  s.papers = 60;
  s.labels = 12;
  const auto a = pc::generate_synthetic(s), b = pc::generate_synthetic(s);
  std::stringstream sa, sb;
  pc::write_jsonl(sa, a.papers);
  pc::write_jsonl(sb, b.papers);
  EXPECT_EQ(sa.str(), sb.str());
  s.seed = 2;
  std::stringstream sc;
  pc::write_jsonl(sc, pc::generate_synthetic(s).papers);
  EXPECT_NE(sa.str(), sc.str());
  for (std::size_t d = 0; d < a.papers.size(); ++d) {
    auto gold = a.papers[d]["labels"].get<std::vector<std::string>>();
    auto planted = a.abstract_labels[d];
    planted.insert(planted.end(), a.full_text_only_labels[d].begin(), a.full_text_only_labels[d].end());
    std::sort(gold.begin(), gold.end());
    std::sort(planted.begin(), planted.end());
    EXPECT_EQ(gold, planted);
    EXPECT_EQ(gold.size(), 3u);
  }
}

TEST(Stages, MissingArtifactNamesTheStage) {
  testutil::TempDir dir("stage_err");
  const auto cfg = small_setup(dir);
  const auto in = pc::PipelineInputs::load(cfg);
  try {
    pc::stage_score(cfg, in, 1);
    FAIL() << "expected StageError";
  } catch (const pc::StageError& e) {
    EXPECT_EQ(e.stage(), "score");
    EXPECT_NE(std::string(e.what()).find("candidates"), std::string::npos);
  }
  try {
    pc::stage_train_encoder(cfg, in, 1);
    FAIL();
  } catch (const pc::StageError& e) {
    EXPECT_EQ(e.stage(), "train-encoder");
  }
}

TEST(Stages, BadInputFileFailsInIngest) {
  testutil::TempDir dir("ingest_err");
  auto cfg = small_setup(dir);
  std::ofstream(dir / "broken.jsonl") << "{\"id\": \"a\"}\n{oops\n";
  cfg.corpus = dir / "broken.jsonl";
  try {
    pc::run_pipeline(cfg);
    FAIL();
  } catch (const pc::StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}

TEST(Stages, SparseGraphFailsInSampling) {
  testutil::TempDir dir("sparse");
  auto cfg = small_setup(dir);
  cfg.meta_path = "P->P";
  std::vector<json> recs;
  for (int d = 0; d < 5; ++d) recs.push_back(testutil::paper_record("p" + std::to_string(d), {testutil::words(12)}));
  pc::write_jsonl(dir / "flat.jsonl", recs);
  cfg.corpus = dir / "flat.jsonl";
  const auto in = pc::PipelineInputs::load(cfg);
  try {
    pc::stage_sample_tuples(cfg, in);
    FAIL();
  } catch (const pc::StageError& e) {
    EXPECT_EQ(e.stage(), "sample-tuples");
  }
}

TEST(RunPipeline, EndToEndDeterministicAndStageEquivalent) {
  testutil::TempDir dir("e2e");
  auto cfg = small_setup(dir, "a");
  const auto r = pc::run_pipeline(cfg, 1);
  ASSERT_TRUE(r.metrics.has_value());
  EXPECT_GE(r.metrics->get("P@1"), 0.9);
  EXPECT_EQ(r.score.cross_calls, r.score.candidates);
  EXPECT_EQ(r.score.bi_calls, r.score.leaves + 15);
  const auto first = slurp(cfg.artifact("predictions.jsonl").string());
  ASSERT_FALSE(first.empty());

  // Same config with more threads.
  auto cfg_b = cfg;
  cfg_b.output_dir = dir / "b";
  pc::run_pipeline(cfg_b, 4);
  EXPECT_EQ(slurp(cfg_b.artifact("predictions.jsonl").string()), first);

  // Stage by stage with fresh inputs per stage.
  auto cfg_c = cfg;
  cfg_c.output_dir = dir / "c";
  auto fresh = [&] { return pc::PipelineInputs::load(cfg_c); };
  pc::stage_ingest(cfg_c, fresh());
  pc::stage_candidates(cfg_c, fresh());
  pc::stage_sample_tuples(cfg_c, fresh());
  pc::stage_train_encoder(cfg_c, fresh(), 1);
  pc::stage_score(cfg_c, fresh(), 1);
  pc::stage_self_train(cfg_c, fresh(), 1);
  pc::stage_predict(cfg_c, fresh(), 1);
  const auto rep = pc::stage_evaluate(cfg_c, fresh());
  EXPECT_EQ(slurp(cfg_c.artifact("predictions.jsonl").string()), first);
  EXPECT_EQ(rep.to_json(), r.metrics->to_json());

  // Each prediction line: top_k label ids and one score per id.
  std::istringstream lines(first);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    EXPECT_EQ(j["ranking"].size(), cfg.top_k);
    EXPECT_EQ(j["top_k_scores"].size(), cfg.top_k);
    ++n;
  }
  EXPECT_EQ(n, 150u);
}

TEST(RunPipeline, AbstractOnlyAblationWithoutSelfTraining) {
  testutil::TempDir dir("ablate");
  auto cfg = small_setup(dir);
  cfg.use_hierarchy = false;
  cfg.self_training = false;
  const auto r = pc::run_pipeline(cfg);
  ASSERT_TRUE(r.metrics.has_value());
  EXPECT_FALSE(std::filesystem::exists(cfg.artifact("classifier.json")));
  // Without self-training only the retrieved candidates are well placed.
  EXPECT_LT(r.metrics->get("P@5"), 1.0);
  const auto in = pc::PipelineInputs::load(cfg);
  EXPECT_THROW(pc::stage_self_train(cfg, in, 1), pc::StageError);
}
