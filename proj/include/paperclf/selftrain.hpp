// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "corpus.hpp"
#include "encoder.hpp"
#include "parallel.hpp"
#include "ranker.hpp"
#include "text.hpp"

namespace paperclf {

/// x_{d,w} = tf(w, d) * ln(|D| / df(w)) over vocabulary words, zeros omitted.
using TfIdfVector = SparseVector;

inline TfIdfVector tfidf_vector(const std::string& text, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> tf;
  for (const auto& tok : tokenize(text))
    if (const auto* e = vocab.find(tok)) tf[static_cast<std::uint32_t>(e->index)] += 1.0;
  TfIdfVector v;
  const double n_docs = static_cast<double>(vocab.num_docs);
  for (const auto& [idx, count] : tf) {
    const double idf = std::log(n_docs / static_cast<double>(vocab.entries.at(vocab.words[idx]).df));
    const double x = count * idf;
    if (x == 0.0) continue;
    v.index.push_back(idx);
    v.value.push_back(x);
  }
  return v;
}

/// Over the paper's full text: title, abstract and all surviving paragraphs.
inline TfIdfVector tfidf_vector(const Paper& paper, const Vocabulary& vocab) {
  return tfidf_vector(paper.full_text(), vocab);
}

inline SparseVector l2_normalized(SparseVector v) {
  const double n = v.norm();
  if (n > 0.0)
    for (double& x : v.value) x /= n;
  return v;
}

/// Per paper, sorted label indices with y_{d,l} = 1.
using PseudoLabels = std::vector<std::vector<std::size_t>>;

/// y_{d,l} = 1 iff l is among the first n candidates by MRR (all of them when
/// |C(d)| < n). Ties at the boundary were already broken by label id.
inline PseudoLabels pseudo_labels(const ScoredCandidates& scored, std::size_t n) {
  if (n == 0) throw ConfigError("pseudo-label count N must be positive");
  PseudoLabels out(scored.size());
  for (std::size_t d = 0; d < scored.size(); ++d) {
    const std::size_t k = std::min(n, scored[d].size());
    for (std::size_t i = 0; i < k; ++i) out[d].push_back(scored[d][i].label);
    std::sort(out[d].begin(), out[d].end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear models

/// Logistic model with a sparse weight vector (indices ascending).
struct LinearModel {
  SparseVector weights;
  double bias = 0.0;

  double margin(const SparseVector& x) const {
    double s = bias;
    std::size_t i = 0, j = 0;
    while (i < x.nnz() && j < weights.nnz()) {
      if (x.index[i] < weights.index[j]) {
        ++i;
      } else if (x.index[i] > weights.index[j]) {
        ++j;
      } else {
        s += x.value[i++] * weights.value[j++];
      }
    }
    return s;
  }

  double probability(const SparseVector& x) const { return sigmoid(margin(x)); }
};

struct LogisticOptions {
  std::size_t epochs = 20;
  double l2 = 1e-4;
  double learning_rate = 0.5;
};

/// L2-regularized logistic regression by seeded SGD over a fixed epoch budget.
/// Weight decay is applied lazily through a running scale factor.
inline LinearModel train_logistic(const std::vector<const SparseVector*>& xs, const std::vector<char>& ys,
                                  std::size_t dim, const LogisticOptions& opt, std::uint64_t seed) {
  std::vector<double> v(dim, 0.0);
  double scale = 1.0, bias = 0.0;
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    shuffle(order, rng);
    const double eta = opt.learning_rate / (1.0 + static_cast<double>(epoch) * 0.1);
    for (auto i : order) {
      const SparseVector& x = *xs[i];
      double z = bias;
      for (std::size_t k = 0; k < x.nnz(); ++k) z += scale * v[x.index[k]] * x.value[k];
      const double g = sigmoid(z) - (ys[i] ? 1.0 : 0.0);
      scale *= 1.0 - eta * opt.l2;
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
      const double step = eta * g / scale;
      for (std::size_t k = 0; k < x.nnz(); ++k) v[x.index[k]] -= step * x.value[k];
      bias -= eta * g;
    }
  }
  LinearModel m;
  m.bias = bias;
  for (std::size_t k = 0; k < dim; ++k) {
    const double w = v[k] * scale;
    if (w != 0.0) {
      m.weights.index.push_back(static_cast<std::uint32_t>(k));
      m.weights.value.push_back(w);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Label trees

struct LabelTreeNode {
  int left = -1;
  int right = -1;
  std::vector<std::size_t> labels;        // every label in this subtree, ascending
  LinearModel router;                     // P(enter this node | parent reached); unused at the root
  std::vector<LinearModel> label_models;  // leaves only, parallel to `labels`

  bool is_leaf() const noexcept { return left < 0; }
};

/// Binary label tree; node 0 is the root.
struct LabelTree {
  std::vector<LabelTreeNode> nodes;

  std::vector<std::size_t> leaf_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].is_leaf()) out.push_back(i);
    return out;
  }

  std::size_t depth(std::size_t node = 0) const {
    const auto& n = nodes[node];
    if (n.is_leaf()) return 1;
    return 1 + std::max(depth(static_cast<std::size_t>(n.left)), depth(static_cast<std::size_t>(n.right)));
  }
};

namespace detail {

inline double sparse_dense_dot(const SparseVector& x, const std::vector<double>& d) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.nnz(); ++k) s += x.value[k] * d[x.index[k]];
  return s;
}

// Balanced spherical 2-means seeded with a random label and its farthest
// neighbour. Labels are sorted by (cos to c0 - cos to c1) and the first half
// goes to cluster 0; iterates until the mean similarity stops improving.
inline std::vector<int> balanced_two_means(const std::vector<std::size_t>& items,
                                           const std::vector<SparseVector>& features, std::size_t dim, Rng& rng,
                                           std::size_t max_iter = 50, double tol = 1e-4) {
  const std::size_t n = items.size();
  std::vector<int> part(n, 0);
  std::vector<std::vector<double>> centers(2, std::vector<double>(dim, 0.0));
  const std::size_t c0 = uniform_index(rng, n);
  for (std::size_t k = 0; k < features[items[c0]].nnz(); ++k)
    centers[0][features[items[c0]].index[k]] = features[items[c0]].value[k];
  // Second seed: the item least similar to the first (lowest id on ties).
  std::size_t c1 = c0 == 0 ? 1 : 0;
  double best = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == c0) continue;
    const double sim = sparse_dense_dot(features[items[i]], centers[0]);
    if (sim < best || (sim == best && items[i] < items[c1])) {
      best = sim;
      c1 = i;
    }
  }
  for (std::size_t k = 0; k < features[items[c1]].nnz(); ++k)
    centers[1][features[items[c1]].index[k]] = features[items[c1]].value[k];

  double old_obj = -1e300, obj = -1e299;
  std::vector<std::pair<double, std::size_t>> diff(n);
  std::vector<std::array<double, 2>> cos(n);
  for (std::size_t iter = 0; iter < max_iter && obj - old_obj > tol; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      cos[i] = {sparse_dense_dot(features[items[i]], centers[0]), sparse_dense_dot(features[items[i]], centers[1])};
      diff[i] = {cos[i][0] - cos[i][1], i};
    }
    std::sort(diff.begin(), diff.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return items[a.second] < items[b.second];
    });
    old_obj = obj;
    obj = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = diff[r].second;
      part[i] = r < (n + 1) / 2 ? 0 : 1;
      obj += cos[i][static_cast<std::size_t>(part[i])];
    }
    obj /= static_cast<double>(n);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& f = features[items[i]];
      for (std::size_t k = 0; k < f.nnz(); ++k) centers[static_cast<std::size_t>(part[i])][f.index[k]] += f.value[k];
    }
    for (auto& c : centers) {
      const double nrm = l2_norm(c);
      if (nrm > 0.0)
        for (double& x : c) x /= nrm;
    }
  }
  return part;
}

inline int grow(LabelTree& tree, std::vector<std::size_t> labels, const std::vector<SparseVector>& features,
                std::size_t dim, std::size_t max_leaf, Rng& rng, bool cluster) {
  std::sort(labels.begin(), labels.end());
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[static_cast<std::size_t>(id)].labels = labels;
  if (labels.size() <= max_leaf) return id;

  std::vector<std::size_t> a, b;
  if (cluster) {
    const auto part = balanced_two_means(labels, features, dim, rng);
    for (std::size_t i = 0; i < labels.size(); ++i) (part[i] == 0 ? a : b).push_back(labels[i]);
  } else {
    // Featureless labels: halve in id order.
    const std::size_t half = (labels.size() + 1) / 2;
    a.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(half));
    b.assign(labels.begin() + static_cast<std::ptrdiff_t>(half), labels.end());
  }
  const int l = grow(tree, std::move(a), features, dim, max_leaf, rng, cluster);
  const int r = grow(tree, std::move(b), features, dim, max_leaf, rng, cluster);
  tree.nodes[static_cast<std::size_t>(id)].left = l;
  tree.nodes[static_cast<std::size_t>(id)].right = r;
  return id;
}

}  // namespace detail

/// Recursive balanced 2-means partitioning of the labels until each leaf holds
/// at most max_leaf labels. Labels whose feature vector is zero are kept
/// together in their own subtree.
inline LabelTree build_label_tree(const std::vector<SparseVector>& label_features, std::size_t dim,
                                  std::size_t max_leaf, std::uint64_t seed) {
  if (max_leaf == 0) throw ConfigError("max_leaf must be positive");
  LabelTree tree;
  std::vector<std::size_t> featured, pooled;
  for (std::size_t l = 0; l < label_features.size(); ++l)
    (label_features[l].empty() ? pooled : featured).push_back(l);
  Rng rng(seed);
  if (label_features.size() <= max_leaf || featured.empty() || pooled.empty()) {
    std::vector<std::size_t> all(label_features.size());
    std::iota(all.begin(), all.end(), 0);
    detail::grow(tree, std::move(all), label_features, dim, max_leaf, rng, !featured.empty() && pooled.empty());
    return tree;
  }
  tree.nodes.emplace_back();
  tree.nodes[0].labels.resize(label_features.size());
  std::iota(tree.nodes[0].labels.begin(), tree.nodes[0].labels.end(), 0);
  const int l = detail::grow(tree, featured, label_features, dim, max_leaf, rng, true);
  const int r = detail::grow(tree, pooled, label_features, dim, max_leaf, rng, false);
  tree.nodes[0].left = l;
  tree.nodes[0].right = r;
  return tree;
}

/// Label feature: normalized mean of the normalized inputs of its positive papers.
inline std::vector<SparseVector> label_features(const std::vector<SparseVector>& normalized_inputs,
                                                const PseudoLabels& y, std::size_t num_labels, std::size_t dim) {
  std::vector<std::vector<double>> acc(num_labels);
  for (std::size_t d = 0; d < y.size(); ++d) {
    for (auto l : y[d]) {
      auto& a = acc.at(l);
      if (a.empty()) a.assign(dim, 0.0);
      const auto& x = normalized_inputs[d];
      for (std::size_t k = 0; k < x.nnz(); ++k) a[x.index[k]] += x.value[k];
    }
  }
  std::vector<SparseVector> out(num_labels);
  for (std::size_t l = 0; l < num_labels; ++l) {
    if (acc[l].empty()) continue;
    for (std::size_t k = 0; k < dim; ++k) {
      if (acc[l][k] == 0.0) continue;
      out[l].index.push_back(static_cast<std::uint32_t>(k));
      out[l].value.push_back(acc[l][k]);
    }
    out[l] = l2_normalized(std::move(out[l]));
  }
  return out;
}

struct SelfTrainConfig {
  std::size_t pseudo_n = 5;
  std::size_t trees = 3;
  std::size_t max_leaf = 100;
  std::size_t beam = 10;
  LogisticOptions logistic;
  std::uint64_t seed = 1;
};

/// Fits the routing and leaf classifiers of one tree. `inputs` must be
/// L2-normalized; papers without pseudo labels are skipped.
inline void train_tree(LabelTree& tree, const std::vector<SparseVector>& inputs, const PseudoLabels& y,
                       std::size_t dim, const LogisticOptions& opt, std::uint64_t seed) {
  std::vector<std::size_t> train_idx;
  for (std::size_t d = 0; d < y.size(); ++d)
    if (!y[d].empty()) train_idx.push_back(d);
  if (train_idx.empty()) throw Error("train_tree: no training papers with pseudo labels");

  auto intersects = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) return true;
      a[i] < b[j] ? ++i : ++j;
    }
    return false;
  };

  // Papers reaching each node: those with a label in its subtree.
  std::vector<std::vector<std::size_t>> reach(tree.nodes.size());
  reach[0] = train_idx;
  for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
    auto& node = tree.nodes[n];
    if (node.is_leaf()) {
      node.label_models.clear();
      for (std::size_t i = 0; i < node.labels.size(); ++i) {
        const std::size_t l = node.labels[i];
        std::vector<const SparseVector*> xs;
        std::vector<char> ys;
        for (auto d : reach[n]) {
          xs.push_back(&inputs[d]);
          ys.push_back(std::binary_search(y[d].begin(), y[d].end(), l) ? 1 : 0);
        }
        node.label_models.push_back(train_logistic(xs, ys, dim, opt, splitmix64(seed ^ (0x1abe1ULL + l))));
      }
      continue;
    }
    for (int child : {node.left, node.right}) {
      auto& c = tree.nodes[static_cast<std::size_t>(child)];
      std::vector<const SparseVector*> xs;
      std::vector<char> ys;
      for (auto d : reach[n]) {
        const bool pos = intersects(y[d], c.labels);
        xs.push_back(&inputs[d]);
        ys.push_back(pos ? 1 : 0);
        if (pos) reach[static_cast<std::size_t>(child)].push_back(d);
      }
      c.router = train_logistic(xs, ys, dim, opt, splitmix64(seed ^ (0x40de0000ULL + static_cast<std::uint64_t>(child))));
    }
  }
}

/// Ensemble of label trees over normalized tf-idf inputs.
struct LabelTreeClassifier {
  std::vector<LabelTree> trees;
  std::size_t num_labels = 0;
  std::size_t input_dim = 0;
};

/// Sparse label -> probability, ascending by label.
using LabelProbabilities = std::vector<std::pair<std::size_t, double>>;

/// Label scores of one tree: beam search keeping the `beam` most probable
/// nodes per level; a leaf's labels score path probability times their leaf
/// classifier output. beam == 0 evaluates every leaf.
inline std::vector<std::pair<std::size_t, double>> predict_tree(const LabelTree& tree, const SparseVector& x,
                                                                std::size_t beam) {
  std::vector<std::pair<std::size_t, double>> scores;
  std::vector<std::pair<std::size_t, double>> level{{0, 1.0}};
  while (!level.empty()) {
    if (beam > 0 && level.size() > beam) {
      std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      level.resize(beam);
    }
    std::vector<std::pair<std::size_t, double>> next;
    for (const auto& [id, p] : level) {
      const auto& node = tree.nodes[id];
      if (node.is_leaf()) {
        for (std::size_t i = 0; i < node.labels.size(); ++i)
          scores.emplace_back(node.labels[i], p * node.label_models[i].probability(x));
        continue;
      }
      for (int child : {node.left, node.right}) {
        const auto c = static_cast<std::size_t>(child);
        next.emplace_back(c, p * tree.nodes[c].router.probability(x));
      }
    }
    level = std::move(next);
  }
  std::sort(scores.begin(), scores.end());
  return scores;
}

/// Mean over trees of the per-tree label scores; labels never reached score 0
/// and are omitted. `x` is the raw tf-idf vector.
inline LabelProbabilities predict_proba(const LabelTreeClassifier& clf, const TfIdfVector& x, std::size_t beam) {
  const SparseVector xn = l2_normalized(x);
  std::vector<double> sum(clf.num_labels, 0.0);
  std::vector<char> hit(clf.num_labels, 0);
  for (const auto& tree : clf.trees) {
    for (const auto& [l, p] : predict_tree(tree, xn, beam)) {
      sum[l] += p;
      hit[l] = 1;
    }
  }
  LabelProbabilities out;
  const double t = static_cast<double>(std::max<std::size_t>(clf.trees.size(), 1));
  for (std::size_t l = 0; l < clf.num_labels; ++l)
    if (hit[l]) out.emplace_back(l, sum[l] / t);
  return out;
}

/// Builds and fits `cfg.trees` trees that differ only in their clustering seed.
inline LabelTreeClassifier train_classifier(const std::vector<TfIdfVector>& inputs, const PseudoLabels& y,
                                            std::size_t num_labels, std::size_t input_dim, const SelfTrainConfig& cfg,
                                            unsigned threads = 1) {
  if (cfg.trees == 0) throw ConfigError("tree count must be positive");
  if (inputs.size() != y.size()) throw Error("train_classifier: inputs and pseudo labels disagree");
  std::vector<SparseVector> xn;
  xn.reserve(inputs.size());
  for (const auto& x : inputs) xn.push_back(l2_normalized(x));
  const auto feats = label_features(xn, y, num_labels, input_dim);

  LabelTreeClassifier clf;
  clf.num_labels = num_labels;
  clf.input_dim = input_dim;
  clf.trees.resize(cfg.trees);
  parallel_for(cfg.trees, threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = splitmix64(cfg.seed + 0x7ee5ULL * (t + 1));
    clf.trees[t] = build_label_tree(feats, input_dim, cfg.max_leaf, tree_seed);
    train_tree(clf.trees[t], xn, y, input_dim, cfg.logistic, tree_seed);
  });
  return clf;
}

/// Final ranking over all of L: the first min(n, |C(d)|) MRR-ranked
/// candidates stay in place, every other label follows by probability
/// (descending, ties by label id).
inline std::vector<std::size_t> final_ranking(const std::vector<CandidateScore>& scored,
                                              const LabelProbabilities& probabilities, std::size_t num_labels,
                                              std::size_t n) {
  std::vector<std::size_t> ranking;
  ranking.reserve(num_labels);
  std::vector<char> pinned(num_labels, 0);
  for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) {
    ranking.push_back(scored[i].label);
    pinned[scored[i].label] = 1;
  }
  std::vector<double> prob(num_labels, 0.0);
  for (const auto& [l, p] : probabilities) prob.at(l) = p;
  std::vector<std::size_t> rest;
  for (std::size_t l = 0; l < num_labels; ++l)
    if (!pinned[l]) rest.push_back(l);
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return prob[a] > prob[b]; });
  ranking.insert(ranking.end(), rest.begin(), rest.end());
  return ranking;
}

// ---------------------------------------------------------------------------
// Classifier checkpoint (JSON)

inline constexpr int kClassifierVersion = 1;

namespace detail {
inline nlohmann::json to_json(const LinearModel& m) {
  return {{"bias", m.bias}, {"index", m.weights.index}, {"value", m.weights.value}};
}
inline LinearModel linear_from_json(const nlohmann::json& j) {
  LinearModel m;
  m.bias = j.at("bias").get<double>();
  m.weights.index = j.at("index").get<std::vector<std::uint32_t>>();
  m.weights.value = j.at("value").get<std::vector<double>>();
  return m;
}
}  // namespace detail

inline void save_classifier(std::ostream& out, const LabelTreeClassifier& clf, const LabelSpace& labels) {
  nlohmann::json j;
  j["version"] = kClassifierVersion;
  j["num_labels"] = clf.num_labels;
  j["input_dim"] = clf.input_dim;
  auto& ids = j["label_ids"] = nlohmann::json::array();
  for (const auto& l : labels.labels) ids.push_back(l.id);
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& tree : clf.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nlohmann::json jn;
      jn["left"] = n.left;
      jn["right"] = n.right;
      jn["labels"] = n.labels;
      jn["router"] = detail::to_json(n.router);
      auto& lm = jn["label_models"] = nlohmann::json::array();
      for (const auto& m : n.label_models) lm.push_back(detail::to_json(m));
      nodes.push_back(std::move(jn));
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  out << j.dump() << '\n';
}

inline LabelTreeClassifier load_classifier(std::istream& in, const LabelSpace& labels,
                                           const std::string& path = "<stream>") {
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("version").get<int>() != kClassifierVersion) throw LoadError(path, 0, "unsupported classifier version");
    const auto ids = j.at("label_ids").get<std::vector<std::string>>();
    if (ids.size() != labels.size()) throw LoadError(path, 0, "classifier was trained on a different label space");
    for (std::size_t l = 0; l < ids.size(); ++l)
      if (ids[l] != labels.labels[l].id) throw LoadError(path, 0, "classifier label ids do not match the label file");
    LabelTreeClassifier clf;
    clf.num_labels = j.at("num_labels").get<std::size_t>();
    clf.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& jt : j.at("trees")) {
      LabelTree tree;
      for (const auto& jn : jt.at("nodes")) {
        LabelTreeNode n;
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        n.labels = jn.at("labels").get<std::vector<std::size_t>>();
        n.router = detail::linear_from_json(jn.at("router"));
        for (const auto& m : jn.at("label_models")) n.label_models.push_back(detail::linear_from_json(m));
        tree.nodes.push_back(std::move(n));
      }
      clf.trees.push_back(std::move(tree));
    }
    return clf;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path, 0, std::string("bad classifier checkpoint: ") + e.what());
  }
}

}  // namespace paperclf
