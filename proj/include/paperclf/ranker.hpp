// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "candidates.hpp"
#include "common.hpp"
#include "corpus.hpp"
#include "encoder.hpp"
#include "parallel.hpp"

namespace paperclf {

/// Node embeddings of one paper in pre-order (node 0 is the root).
/// Internal nodes hold the plain mean of their children, never renormalized.
struct AggregatedEmbeddings {
  std::vector<Embedding> nodes;
  const Embedding& root() const { return nodes.front(); }
};

/// Bottom-up mean over the hierarchy. `leaf_embeddings` follows
/// Paper::leaves() order. A paper without any leaf gets a zero root of
/// dimension `dim`.
inline AggregatedEmbeddings aggregate_hierarchy(const HierarchyNode& root, const std::vector<Embedding>& leaf_embeddings,
                                                std::size_t dim) {
  // Flatten to pre-order with child links.
  std::vector<const HierarchyNode*> order;
  std::vector<std::vector<std::size_t>> kids;
  std::vector<std::pair<const HierarchyNode*, std::size_t>> stack{{&root, SIZE_MAX}};
  while (!stack.empty()) {
    auto [node, par] = stack.back();
    stack.pop_back();
    const std::size_t self = order.size();
    order.push_back(node);
    kids.emplace_back();
    if (par != SIZE_MAX) kids[par].push_back(self);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) stack.emplace_back(&*it, self);
  }

  AggregatedEmbeddings out;
  out.nodes.assign(order.size(), Embedding(dim, 0.0));
  std::size_t leaf = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!order[i]->is_leaf()) continue;
    if (leaf >= leaf_embeddings.size()) throw Error("aggregate_hierarchy: fewer leaf embeddings than leaves");
    if (leaf_embeddings[leaf].size() != dim) throw Error("aggregate_hierarchy: leaf embedding dimension mismatch");
    out.nodes[i] = leaf_embeddings[leaf++];
  }
  if (leaf != leaf_embeddings.size()) throw Error("aggregate_hierarchy: more leaf embeddings than leaves");

  // Children always follow their parent in pre-order, so a reverse sweep
  // finalizes every child before its parent is averaged.
  for (std::size_t i = order.size(); i-- > 0;) {
    if (order[i]->is_leaf() || kids[i].empty()) continue;
    auto& dst = out.nodes[i];
    for (auto c : kids[i])
      for (std::size_t k = 0; k < dim; ++k) dst[k] += out.nodes[c][k];
    const double n = static_cast<double>(kids[i].size());
    for (double& x : dst) x /= n;
  }
  return out;
}

inline AggregatedEmbeddings aggregate_hierarchy(const Paper& paper, const std::vector<Embedding>& leaf_embeddings,
                                                std::size_t dim) {
  return aggregate_hierarchy(paper.hierarchy, leaf_embeddings, dim);
}

/// score_B(d, l) = cos(h_d, h_l) for each candidate.
inline std::vector<double> score_bi(const Embedding& paper_embedding, const std::vector<Embedding>& label_embeddings,
                                    const std::vector<std::size_t>& candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (auto l : candidates) out.push_back(cosine(paper_embedding, label_embeddings.at(l)));
  return out;
}

/// Counts encoder evaluations made during inference.
struct InferenceCounters {
  std::atomic<std::size_t> cross_calls{0};
  std::atomic<std::size_t> bi_calls{0};
};

/// score_X(d, l) = cross_score(a_d, t_l) for each candidate: exactly one
/// evaluation per candidate.
inline std::vector<double> score_cross(const ScorerModel& model, const Paper& paper, const LabelSpace& labels,
                                       const std::vector<std::size_t>& candidates,
                                       InferenceCounters* counters = nullptr, const EmbeddingTable* overrides = nullptr) {
  std::vector<double> out;
  out.reserve(candidates.size());
  const std::string a_d = paper.title_abstract();
  auto embed = [&](const std::string& key, const std::string& text) {
    if (overrides)
      if (auto it = overrides->find(key); it != overrides->end()) return it->second;
    return bi_embed(model, text);
  };
  for (auto l : candidates) {
    const auto& label = labels.labels.at(l);
    out.push_back(pair_score(model, embed(paragraph_key(paper.id, 0), a_d), embed(label.id, label.text())));
    if (counters) ++counters->cross_calls;
  }
  return out;
}

struct CandidateScore {
  std::size_t label = 0;  // index into the label space
  double score_b = 0.0;
  double score_x = 0.0;
  std::size_t rank_b = 0;
  std::size_t rank_x = 0;
  double mrr = 0.0;
};

/// Per paper, candidates sorted by MRR descending (ties: label id ascending).
using ScoredCandidates = std::vector<std::vector<CandidateScore>>;

namespace detail {
// 1-based positions after sorting by score descending, ties by label ascending.
inline std::vector<std::size_t> dense_ranks(const std::vector<std::size_t>& labels, const std::vector<double>& scores) {
  std::vector<std::size_t> idx(labels.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return labels[a] < labels[b];
  });
  std::vector<std::size_t> rank(labels.size());
  for (std::size_t pos = 0; pos < idx.size(); ++pos) rank[idx[pos]] = pos + 1;
  return rank;
}
}  // namespace detail

/// MRR(l|d) = 1/r_B + 1/r_X over the candidate set.
inline std::vector<CandidateScore> mrr_combine(const std::vector<std::size_t>& candidates,
                                               const std::vector<double>& score_b, const std::vector<double>& score_x) {
  if (score_b.size() != candidates.size() || score_x.size() != candidates.size())
    throw Error("mrr_combine: score lists must cover the candidate set");
  const auto rb = detail::dense_ranks(candidates, score_b);
  const auto rx = detail::dense_ranks(candidates, score_x);
  std::vector<CandidateScore> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out[i] = {candidates[i], score_b[i], score_x[i], rb[i], rx[i],
              1.0 / static_cast<double>(rb[i]) + 1.0 / static_cast<double>(rx[i])};
  }
  std::sort(out.begin(), out.end(), [](const CandidateScore& a, const CandidateScore& b) {
    if (a.mrr != b.mrr) return a.mrr > b.mrr;
    return a.label < b.label;
  });
  return out;
}

struct ScoringOptions {
  /// false: h_d is the title+abstract embedding alone (abstract-only ablation).
  bool use_hierarchy = true;
  unsigned threads = 1;
};

/// Scores every paper's candidates. Performs |L| label embeddings, one
/// embedding per paragraph leaf, and one cross evaluation per candidate.
inline ScoredCandidates score_corpus(const ScorerModel& model, const Corpus& corpus, const LabelSpace& labels,
                                     const CandidateSets& candidates, const ScoringOptions& opts = {},
                                     InferenceCounters* counters = nullptr, const EmbeddingTable* overrides = nullptr) {
  if (candidates.size() != corpus.size()) throw Error("score_corpus: candidate sets do not match the corpus");
  auto embed = [&](const std::string& key, const std::string& text) -> Embedding {
    if (counters) ++counters->bi_calls;
    if (overrides)
      if (auto it = overrides->find(key); it != overrides->end()) return it->second;
    return bi_embed(model, text);
  };

  std::vector<Embedding> label_emb(labels.size());
  parallel_for(labels.size(), opts.threads,
               [&](std::size_t l) { label_emb[l] = embed(labels.labels[l].id, labels.labels[l].text()); });

  ScoredCandidates out(corpus.size());
  parallel_for(corpus.size(), opts.threads, [&](std::size_t d) {
    const Paper& paper = corpus.papers[d];
    const auto& cand = candidates[d];
    const auto score_x = score_cross(model, paper, labels, cand, counters, overrides);

    const auto ls = paper.leaves();
    Embedding h_d;
    if (opts.use_hierarchy) {
      std::vector<Embedding> leaf_emb;
      leaf_emb.reserve(ls.size());
      for (std::size_t i = 0; i < ls.size(); ++i) leaf_emb.push_back(embed(paragraph_key(paper.id, i), ls[i]->text));
      h_d = aggregate_hierarchy(paper, leaf_emb, model.embed_dim).root();
    } else if (!ls.empty() && ls.front()->is_abstract) {
      h_d = embed(paragraph_key(paper.id, 0), ls.front()->text);
    } else {
      h_d.assign(model.embed_dim, 0.0);
    }
    out[d] = mrr_combine(cand, score_bi(h_d, label_emb, cand), score_x);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Score dump: {"paper_id", "candidates": [{label_id, score_b, score_x, rank_b, rank_x, mrr}]}

inline void write_scores(std::ostream& out, const Corpus& corpus, const LabelSpace& labels,
                         const ScoredCandidates& scored) {
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    nlohmann::json j;
    j["paper_id"] = corpus.papers[d].id;
    auto& arr = j["candidates"] = nlohmann::json::array();
    for (const auto& c : scored[d]) {
      arr.push_back({{"label_id", labels.labels[c.label].id},
                     {"score_b", c.score_b},
                     {"score_x", c.score_x},
                     {"rank_b", c.rank_b},
                     {"rank_x", c.rank_x},
                     {"mrr", c.mrr}});
    }
    out << j.dump() << '\n';
  }
}

inline ScoredCandidates read_scores(std::istream& in, const Corpus& corpus, const LabelSpace& labels,
                                    const std::string& path = "<stream>") {
  ScoredCandidates scored(corpus.size());
  std::vector<char> seen(corpus.size(), 0);
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
      std::vector<CandidateScore> list;
      for (const auto& c : j.at("candidates")) {
        auto idx = labels.index_of(c.at("label_id").get<std::string>());
        if (!idx) throw LoadError(path, lineno, "unknown label id");
        list.push_back({*idx, c.at("score_b").get<double>(), c.at("score_x").get<double>(),
                        c.at("rank_b").get<std::size_t>(), c.at("rank_x").get<std::size_t>(), c.at("mrr").get<double>()});
      }
      scored[it->second] = std::move(list);
      seen[it->second] = 1;
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(path, lineno, std::string("bad score record: ") + e.what());
    }
  }
  for (std::size_t d = 0; d < corpus.size(); ++d)
    if (!seen[d]) throw LoadError(path, 0, "no score record for paper '" + corpus.papers[d].id + "'");
  return scored;
}

}  // namespace paperclf
