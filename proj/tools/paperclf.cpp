// SPDX-License-Identifier: Apache-2.0
// Command-line driver: one subcommand per pipeline stage plus run-all and synth.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <paperclf/paperclf.hpp>

namespace pc = paperclf;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string corpus, labels, output_dir;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON config file");
  cmd->add_option("--set", c.overrides, "override a config field, e.g. --set training.learning_rate=0.005");
  cmd->add_option("--corpus", c.corpus, "corpus JSON Lines file");
  cmd->add_option("--labels", c.labels, "label JSON Lines file");
  cmd->add_option("-o,--output", c.output_dir, "artifact directory");
  cmd->add_option("-j,--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

pc::PipelineConfig resolve(const Common& c) {
  pc::PipelineConfig cfg = c.config_path.empty() ? pc::PipelineConfig{} : pc::PipelineConfig::load(c.config_path);
  for (const auto& o : c.overrides) cfg.set(o);
  if (!c.corpus.empty()) cfg.corpus = c.corpus;
  if (!c.labels.empty()) cfg.labels = c.labels;
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  cfg.validate();
  return cfg;
}

pc::PipelineInputs inputs(const pc::PipelineConfig& cfg) {
  try {
    return pc::PipelineInputs::load(cfg);
  } catch (const std::exception& e) {
    throw pc::StageError("ingest", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised multi-label classification of full-text papers"};
  app.require_subcommand(1);

  Common common;
  std::string stage;
  auto stage_cmd = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, common);
    cmd->callback([&stage, name] { stage = name; });
    return cmd;
  };
  stage_cmd("ingest", "parse the corpus and labels, report statistics");
  stage_cmd("candidates", "retrieve candidate labels by exact name match");
  stage_cmd("sample-tuples", "sample contrastive paragraph tuples from the citation graph");
  stage_cmd("train-encoder", "fine-tune the paragraph scorer on sampled tuples");
  stage_cmd("score", "score candidates with both encoders and combine by reciprocal rank");
  stage_cmd("self-train", "train the label-tree classifier on pseudo labels");
  stage_cmd("predict", "merge pinned pseudo labels with classifier probabilities");
  stage_cmd("evaluate", "compute ranking metrics against ground truth");
  stage_cmd("run-all", "run every stage in order");
  auto* dump = app.add_subcommand("config", "print the resolved config as JSON");
  add_common(dump, common);
  dump->callback([&stage] { stage = "config"; });

  pc::SyntheticSpec spec;
  std::string synth_dir = "synthetic";
  auto* synth = app.add_subcommand("synth", "write a planted-label corpus with ground truth");
  synth->add_option("-o,--output", synth_dir, "directory for corpus.jsonl, labels.jsonl, planted.jsonl");
  synth->add_option("--papers", spec.papers);
  synth->add_option("--labels", spec.labels);
  synth->add_option("--labels-per-paper", spec.labels_per_paper);
  synth->add_option("--full-text-fraction", spec.full_text_only_fraction);
  synth->add_option("--vocabulary", spec.vocabulary);
  synth->add_option("--citation-probability", spec.citation_probability);
  synth->add_option("--seed", spec.seed);
  synth->callback([&stage] { stage = "synth"; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (stage == "synth") {
      const auto data = pc::generate_synthetic(spec);
      std::filesystem::create_directories(synth_dir);
      const std::filesystem::path dir(synth_dir);
      pc::write_jsonl((dir / "corpus.jsonl").string(), data.papers);
      pc::write_jsonl((dir / "labels.jsonl").string(), data.labels);
      std::vector<nlohmann::json> planted;
      for (std::size_t d = 0; d < data.papers.size(); ++d)
        planted.push_back({{"paper_id", data.papers[d]["id"]},
                           {"abstract_labels", data.abstract_labels[d]},
                           {"full_text_only_labels", data.full_text_only_labels[d]}});
      pc::write_jsonl((dir / "planted.jsonl").string(), planted);
      std::cerr << "wrote " << data.papers.size() << " papers and " << data.labels.size() << " labels to "
                << synth_dir << "\n";
      return 0;
    }

    const auto cfg = resolve(common);
    if (stage == "config") {
      std::cout << cfg.to_json().dump(2) << "\n";
      return 0;
    }
    if (stage == "run-all") {
      const auto r = pc::run_pipeline(cfg, common.threads);
      if (r.metrics) std::cout << r.metrics->to_json().dump(2) << "\n";
      return 0;
    }

    const auto in = inputs(cfg);
    if (stage == "ingest") {
      const auto s = pc::stage_ingest(cfg, in);
      std::cerr << s.corpus.papers << " papers, " << s.corpus.body_paragraphs << " paragraphs ("
                << s.corpus.removed_paragraphs << " removed, " << s.corpus.empty_papers << " empty papers), "
                << s.labels << " labels, " << s.edges << " citation edges\n";
    } else if (stage == "candidates") {
      const auto s = pc::stage_candidates(cfg, in);
      std::cerr << "lambda = " << s.mean_candidates << ", " << s.empty_papers << " papers without candidates\n";
    } else if (stage == "sample-tuples") {
      std::cerr << pc::stage_sample_tuples(cfg, in) << " tuples\n";
    } else if (stage == "train-encoder") {
      const auto r = pc::stage_train_encoder(cfg, in, common.threads);
      std::cerr << r.steps << " steps, final loss " << (r.loss_trace.empty() ? 0.0 : r.loss_trace.back()) << "\n";
    } else if (stage == "score") {
      const auto s = pc::stage_score(cfg, in, common.threads);
      std::cerr << s.cross_calls << " cross evaluations, " << s.bi_calls << " bi embeddings\n";
    } else if (stage == "self-train") {
      pc::stage_self_train(cfg, in, common.threads);
    } else if (stage == "predict") {
      pc::stage_predict(cfg, in, common.threads);
    } else if (stage == "evaluate") {
      std::cout << pc::stage_evaluate(cfg, in).to_json().dump(2) << "\n";
    }
    return 0;
  } catch (const pc::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
