// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"

namespace pc = paperclf;

namespace {

// Natural-log DCG written independently of the library's discount.
double ln_ndcg(const std::vector<std::size_t>& r, const pc::GoldSet& g, std::size_t k) {
  double dcg = 0, idcg = 0;
  for (std::size_t i = 0; i < k && i < r.size(); ++i)
    if (std::find(g.begin(), g.end(), r[i]) != g.end()) dcg += 1.0 / std::log(static_cast<double>(i) + 2.0);
  for (std::size_t i = 0; i < std::min(k, g.size()); ++i) idcg += 1.0 / std::log(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

std::vector<std::size_t> iota_ranking(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

}  // namespace

TEST(Precision, Counting) {
  const std::vector<std::size_t> r{10, 11, 12, 13, 14};
  EXPECT_DOUBLE_EQ(pc::precision_at_k(r, {10, 12}, 5), 0.4);
  EXPECT_DOUBLE_EQ(pc::precision_at_k(r, {99}, 5), 0.0);
  EXPECT_DOUBLE_EQ(pc::precision_at_k(r, {10, 11, 12}, 3), 1.0);
  EXPECT_DOUBLE_EQ(pc::precision_at_k({10}, {10}, 3), 1.0 / 3.0);  // short ranking
  EXPECT_THROW(pc::precision_at_k(r, {10}, 0), pc::Error);
}

TEST(Ndcg, Examples) {
  const std::vector<std::size_t> r{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(pc::ndcg_at_k(r, {1, 2}, 5), 1.0);
  const double want = (1 / std::log(2.0) + 1 / std::log(4.0)) / (1 / std::log(2.0) + 1 / std::log(3.0));
  EXPECT_NEAR(pc::ndcg_at_k(r, {1, 3}, 3), want, 1e-15);
  EXPECT_NEAR(pc::ndcg_at_k(r, {1, 3}, 3), 0.9197, 1e-4);
  EXPECT_EQ(pc::ndcg_at_k(r, {7, 8}, 3), 0.0);
  EXPECT_EQ(pc::ndcg_at_k(r, {}, 3), 0.0);
}

TEST(Ndcg, BaseInvariantAndBoundedOnRandomInstances) {
  pc::Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t L = 2 + pc::uniform_index(rng, 20);
    auto r = iota_ranking(L);
    pc::shuffle(r, rng);
    pc::GoldSet g;
    for (std::size_t l = 0; l < L; ++l)
      if (pc::uniform_real(rng) < 0.3) g.push_back(l);
    if (g.empty()) g.push_back(0);
    const std::size_t k = 1 + pc::uniform_index(rng, 6);
    const double n = pc::ndcg_at_k(r, g, k), p = pc::precision_at_k(r, g, k);
    EXPECT_NEAR(n, ln_ndcg(r, g, k), 1e-12);
    EXPECT_GE(n, 0.0);
    EXPECT_LE(n, 1.0 + 1e-15);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    // Only the top-k prefix matters.
    auto tail = r;
    if (tail.size() > k) std::reverse(tail.begin() + static_cast<std::ptrdiff_t>(k), tail.end());
    EXPECT_EQ(pc::ndcg_at_k(tail, g, k), n);
    EXPECT_EQ(pc::precision_at_k(tail, g, k), p);
  }
}

TEST(Propensity, MonotoneAndAboveOne) {
  const pc::PropensityModel m;
  double prev = m.reward(0, 1000);
  EXPECT_GT(prev, 1.0);
  for (double n = 1; n <= 1e6; n = n < 100 ? n + 1 : n * 1.5) {
    const double r = m.reward(n, 1000);
    EXPECT_LT(r, prev);
    EXPECT_GT(r, 1.0);
    prev = r;
  }
  EXPECT_LT(m.reward(1e6, 1000) - 1, m.reward(10, 1000) - 1);
}

TEST(Propensity, ClosedFormInLongDouble) {
  const long double A = 0.55L, B = 1.5L, D = 1000.0L, N = 5.0L;
  const long double C = (std::log(D) - 1.0L) * std::pow(B + 1.0L, A);
  const long double want = 1.0L + C * std::pow(N + B, -A);
  EXPECT_NEAR(pc::propensity(5, 1000), static_cast<double>(want), 1e-12);
}

TEST(Propensity, TinyCorpusIsAnError) {
  EXPECT_THROW(pc::propensity(1, 2), pc::Error);
  EXPECT_THROW(pc::PropensityModel{}.c(0), pc::Error);
  pc::PropensityModel base10{0.55, 1.5, 10.0};
  EXPECT_THROW(base10.c(5), pc::Error);  // log10(5) - 1 < 0
  EXPECT_GT(base10.c(1000), 0.0);
}

TEST(Psp, UnitRewardsReduceToPrecision) {
  pc::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 3 + pc::uniform_index(rng, 15);
    auto r = iota_ranking(L);
    pc::shuffle(r, rng);
    pc::GoldSet g;
    for (std::size_t l = 0; l < L; ++l)
      if (pc::uniform_real(rng) < 0.3) g.push_back(l);
    const std::vector<double> ones(L, 1.0);
    for (std::size_t k : {1, 3, 5}) EXPECT_EQ(pc::psp_at_k(r, g, ones, k), pc::precision_at_k(r, g, k));
  }
}

TEST(Psp, AtOneEqualsPsnAtOne) {
  pc::Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t L = 3 + pc::uniform_index(rng, 15);
    auto r = iota_ranking(L);
    pc::shuffle(r, rng);
    pc::GoldSet g{pc::uniform_index(rng, L)};
    std::vector<double> rewards(L);
    for (double& x : rewards) x = 1.0 + 10.0 * pc::uniform_real(rng);
    EXPECT_EQ(pc::psp_at_k(r, g, rewards, 1), pc::psn_at_k(r, g, rewards, 1));
  }
}

TEST(Psp, RareLabelSwapIncreasesScore) {
  // Label 0 is relevant to every paper, label 1 to one; both are gold for paper 0.
  std::vector<pc::GoldSet> gold = {{0, 1}, {0}, {0}, {0}, {0}};
  const auto rewards = pc::label_rewards(gold, 3);
  ASSERT_GT(rewards[1], rewards[0]);
  const std::vector<std::size_t> common_first{0, 2, 1}, rare_first{1, 2, 0};
  EXPECT_EQ(pc::precision_at_k(common_first, gold[0], 1), pc::precision_at_k(rare_first, gold[0], 1));
  EXPECT_GT(pc::psp_at_k(rare_first, gold[0], rewards, 1), pc::psp_at_k(common_first, gold[0], rewards, 1));
  EXPECT_GT(pc::psn_at_k(rare_first, gold[0], rewards, 1), pc::psn_at_k(common_first, gold[0], rewards, 1));
}

TEST(Evaluate, MacroAverageSkipsEmptyGold) {
  const std::vector<std::vector<std::size_t>> rankings = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}};
  const std::vector<pc::GoldSet> gold = {{0}, {0}, {}};
  testutil::WarningCapture w;
  pc::MetricsOptions opt;
  opt.precision_k = {1};
  opt.ndcg_k = {3};
  opt.psp_k = {1};
  opt.psn_k = {};
  const auto rep = pc::evaluate(rankings, gold, 3, opt, 1.5);
  EXPECT_EQ(rep.evaluated_papers, 2u);
  EXPECT_EQ(rep.skipped_papers, 1u);
  EXPECT_EQ(w.messages.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.get("P@1"), 0.5);
  EXPECT_NEAR(rep.get("NDCG@3"), (1.0 + 1.0 / std::log2(3.0)) / 2.0, 1e-15);
  const auto rewards = pc::label_rewards(gold, 3);
  EXPECT_DOUBLE_EQ(rep.get("PSP@1"), rewards[0] / 2.0);
  EXPECT_THROW(rep.get("PSN@1"), pc::Error);
  const auto j = rep.to_json();
  EXPECT_EQ(j["lambda"].get<double>(), 1.5);
  EXPECT_EQ(rep.csv_header(), "P@1,NDCG@3,PSP@1,evaluated_papers,skipped_papers,lambda");
  EXPECT_THROW(pc::evaluate(rankings, {{0}}, 3), pc::Error);
}

TEST(Evaluate, GoldFromCorpusRejectsUnknownLabels) {
  auto rec = testutil::paper_record("p", {testutil::words(10)});
  rec["labels"] = {"b", "a", "a"};
  const auto corpus = pc::corpus_from_records({rec});
  const auto labels = pc::make_label_space({pc::make_label("a", {"a"}, ""), pc::make_label("b", {"b"}, "")});
  EXPECT_EQ(pc::gold_from_corpus(corpus, labels)[0], (pc::GoldSet{0, 1}));
  const auto only_a = pc::make_label_space({pc::make_label("a", {"a"}, "")});
  EXPECT_THROW(pc::gold_from_corpus(corpus, only_a), pc::Error);
}
