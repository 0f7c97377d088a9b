// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "corpus.hpp"

namespace paperclf {

/// Relevant label indices of one paper, ascending.
using GoldSet = std::vector<std::size_t>;

namespace detail {
inline void check_k(std::size_t k) {
  if (k == 0) throw Error("metrics: k must be at least 1");
}
inline bool relevant(const GoldSet& gold, std::size_t label) {
  return std::binary_search(gold.begin(), gold.end(), label);
}
// 1/log2(rank + 1)
inline double discount(std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }
inline double ideal_dcg(std::size_t k, std::size_t n_gold) {
  double s = 0.0;
  for (std::size_t i = 1; i <= std::min(k, n_gold); ++i) s += discount(i);
  return s;
}
}  // namespace detail

/// (1/k) * number of relevant labels among the first k; missing ranks count as irrelevant.
inline double precision_at_k(const std::vector<std::size_t>& ranking, const GoldSet& gold, std::size_t k) {
  detail::check_k(k);
  double hits = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) hits += detail::relevant(gold, ranking[i]) ? 1.0 : 0.0;
  return hits / static_cast<double>(k);
}

/// DCG@k over the ideal prefix of min(k, |gold|) hits. Empty gold gives 0.
inline double ndcg_at_k(const std::vector<std::size_t>& ranking, const GoldSet& gold, std::size_t k) {
  detail::check_k(k);
  if (gold.empty()) return 0.0;
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i)
    if (detail::relevant(gold, ranking[i])) dcg += detail::discount(i + 1);
  return dcg / detail::ideal_dcg(k, gold.size());
}

/// Inverse propensity 1/p_l = 1 + C (N_l + B)^-A with C = (log|D| - 1)(B + 1)^A.
struct PropensityModel {
  double a = 0.55;
  double b = 1.5;
  double log_base = std::numbers::e;

  double c(std::size_t corpus_size) const {
    if (corpus_size < 3) throw Error("propensity: corpus needs at least 3 papers for a positive C");
    const double c = (std::log(static_cast<double>(corpus_size)) / std::log(log_base) - 1.0) * std::pow(b + 1.0, a);
    if (!(c > 0.0)) throw Error("propensity: C is not positive for this corpus size and log base");
    return c;
  }

  double reward(double n_l, std::size_t corpus_size) const { return 1.0 + c(corpus_size) * std::pow(n_l + b, -a); }
};

inline double propensity(double n_l, std::size_t corpus_size, double a = 0.55, double b = 1.5) {
  return PropensityModel{a, b}.reward(n_l, corpus_size);
}

/// Per-label rewards from the ground truth of the whole corpus.
inline std::vector<double> label_rewards(const std::vector<GoldSet>& gold, std::size_t num_labels,
                                         const PropensityModel& model = {}) {
  std::vector<double> n(num_labels, 0.0);
  for (const auto& g : gold)
    for (auto l : g) n.at(l) += 1.0;
  std::vector<double> r(num_labels);
  for (std::size_t l = 0; l < num_labels; ++l) r[l] = model.reward(n[l], gold.size());
  return r;
}

inline double psp_at_k(const std::vector<std::size_t>& ranking, const GoldSet& gold, const std::vector<double>& rewards,
                       std::size_t k) {
  detail::check_k(k);
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i)
    if (detail::relevant(gold, ranking[i])) s += rewards.at(ranking[i]);
  return s / static_cast<double>(k);
}

inline double psn_at_k(const std::vector<std::size_t>& ranking, const GoldSet& gold, const std::vector<double>& rewards,
                       std::size_t k) {
  detail::check_k(k);
  if (gold.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i)
    if (detail::relevant(gold, ranking[i])) s += rewards.at(ranking[i]) * detail::discount(i + 1);
  return s / detail::ideal_dcg(k, gold.size());
}

// ---------------------------------------------------------------------------
// Corpus-level report

struct MetricsOptions {
  std::vector<std::size_t> precision_k{1, 3, 5};
  std::vector<std::size_t> ndcg_k{3, 5};
  std::vector<std::size_t> psp_k{1, 3, 5};
  std::vector<std::size_t> psn_k{3, 5};
  PropensityModel propensity;
};

struct MetricsReport {
  std::vector<std::pair<std::string, double>> values;  // e.g. {"P@1", 0.93}
  std::size_t evaluated_papers = 0;
  std::size_t skipped_papers = 0;  // empty ground truth
  double mean_candidates = 0.0;    // lambda

  double get(const std::string& name) const {
    for (const auto& [k, v] : values)
      if (k == name) return v;
    throw Error("metrics: no value named '" + name + "'");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : values) j[k] = v;
    j["evaluated_papers"] = evaluated_papers;
    j["skipped_papers"] = skipped_papers;
    j["lambda"] = mean_candidates;
    return j;
  }

  std::string csv_header() const {
    std::string s;
    for (const auto& [k, v] : values) s += k + ",";
    return s + "evaluated_papers,skipped_papers,lambda";
  }

  std::string csv_row() const {
    std::string s;
    for (const auto& [k, v] : values) s += nlohmann::json(v).dump() + ",";
    return s + std::to_string(evaluated_papers) + "," + std::to_string(skipped_papers) + "," +
           nlohmann::json(mean_candidates).dump();
  }
};

/// Macro-average over papers with at least one gold label. Rewards use N_l
/// counted over every paper in `gold`.
inline MetricsReport evaluate(const std::vector<std::vector<std::size_t>>& rankings, const std::vector<GoldSet>& gold,
                              std::size_t num_labels, const MetricsOptions& opt = {}, double mean_candidates = 0.0) {
  if (rankings.size() != gold.size()) throw Error("evaluate: rankings and ground truth cover different papers");
  const auto rewards = label_rewards(gold, num_labels, opt.propensity);
  MetricsReport rep;
  rep.mean_candidates = mean_candidates;
  auto add = [&](const std::string& prefix, const std::vector<std::size_t>& ks, auto&& fn) {
    for (auto k : ks) {
      double sum = 0.0;
      for (std::size_t d = 0; d < gold.size(); ++d)
        if (!gold[d].empty()) sum += fn(rankings[d], gold[d], k);
      rep.values.emplace_back(prefix + std::to_string(k), rep.evaluated_papers ? sum / static_cast<double>(rep.evaluated_papers) : 0.0);
    }
  };
  for (const auto& g : gold) (g.empty() ? rep.skipped_papers : rep.evaluated_papers)++;
  add("P@", opt.precision_k, [](const auto& r, const auto& g, std::size_t k) { return precision_at_k(r, g, k); });
  add("NDCG@", opt.ndcg_k, [](const auto& r, const auto& g, std::size_t k) { return ndcg_at_k(r, g, k); });
  add("PSP@", opt.psp_k, [&](const auto& r, const auto& g, std::size_t k) { return psp_at_k(r, g, rewards, k); });
  add("PSN@", opt.psn_k, [&](const auto& r, const auto& g, std::size_t k) { return psn_at_k(r, g, rewards, k); });
  if (rep.skipped_papers) warn("evaluate: skipped " + std::to_string(rep.skipped_papers) + " paper(s) without gold labels");
  return rep;
}

/// Gold sets from the corpus `labels` field; ids missing from L are an error.
inline std::vector<GoldSet> gold_from_corpus(const Corpus& corpus, const LabelSpace& labels) {
  std::vector<GoldSet> gold(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& p = corpus.papers[d];
    if (!p.gold_labels) continue;
    for (const auto& id : *p.gold_labels) {
      auto idx = labels.index_of(id);
      if (!idx) throw Error("ground truth of paper '" + p.id + "' references unknown label '" + id + "'");
      gold[d].push_back(*idx);
    }
    std::sort(gold[d].begin(), gold[d].end());
    gold[d].erase(std::unique(gold[d].begin(), gold[d].end()), gold[d].end());
  }
  return gold;
}

}  // namespace paperclf
