// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"

namespace pc = paperclf;
using testutil::json;
using testutil::paper_record;
using testutil::words;

namespace {

pc::LabelSpace space(std::vector<pc::Label> ls) { return pc::make_label_space(std::move(ls)); }

pc::Paper paper(const std::string& title, const std::string& abstract, const std::vector<std::string>& body = {}) {
  return pc::parse_paper(paper_record("d", body, {}, title, abstract), 10);
}

std::vector<std::string> ids(const pc::LabelSpace& ls, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(ls.labels[i].id);
  return out;
}

}  // namespace

TEST(NameIndex, AllNamesOfALabelMapToIt) {
  const auto ls = space({pc::make_label("D016207", {"calprotectin", "leukocyte l1 antigen complex"}, "")});
  const auto idx = pc::build_name_index(ls);
  ASSERT_NE(idx.lookup("calprotectin"), nullptr);
  ASSERT_NE(idx.lookup("leukocyte l1 antigen complex"), nullptr);
  EXPECT_EQ(*idx.lookup("calprotectin"), std::vector<std::size_t>{0});
  EXPECT_EQ(*idx.lookup("leukocyte l1 antigen complex"), std::vector<std::size_t>{0});
  EXPECT_EQ(idx.lookup("leukocyte"), nullptr);
}

TEST(NameIndex, SharedNameMapsToBothLabels) {
  const auto ls = space({pc::make_label("b", {"Transformer"}, ""), pc::make_label("a", {"transformer"}, "")});
  const auto idx = pc::build_name_index(ls);
  ASSERT_NE(idx.lookup("transformer"), nullptr);
  EXPECT_EQ(*idx.lookup("transformer"), (std::vector<std::size_t>{0, 1}));
}

TEST(NameIndex, EmptyLabelSpace) {
  const auto idx = pc::build_name_index(pc::LabelSpace{});
  EXPECT_TRUE(idx.match(pc::tokenize("anything at all")).empty());
}

TEST(Retrieve, VerbatimNameInAbstract) {
  const auto ls = space({pc::make_label("V", {"voronoi diagram"}, ""), pc::make_label("M", {"motion planning"}, "")});
  const auto idx = pc::build_name_index(ls);
  const auto p = paper("Robot navigation", "We plan paths based on a voronoi diagram technique and path planning.");
  EXPECT_EQ(ids(ls, pc::retrieve_candidates(p, idx)), std::vector<std::string>{"V"});
}

TEST(Retrieve, EmptyTitleAndAbstract) {
  const auto ls = space({pc::make_label("V", {"voronoi diagram"}, "")});
  EXPECT_TRUE(pc::retrieve_candidates(paper("", ""), pc::build_name_index(ls)).empty());
}

TEST(Retrieve, TokenBoundariesRespected) {
  const auto ls = space({pc::make_label("A", {"art"}, ""), pc::make_label("B", {"particle physics"}, "")});
  const auto idx = pc::build_name_index(ls);
  EXPECT_TRUE(pc::retrieve_candidates(paper("", "a particle accelerator for physics"), idx).empty());
  EXPECT_EQ(ids(ls, pc::retrieve_candidates(paper("", "Particle-Physics and ART."), idx)),
            (std::vector<std::string>{"A", "B"}));
}

TEST(Retrieve, OverlappingAndMultiNameMatches) {
  const auto ls = space({pc::make_label("N", {"neural network"}, ""), pc::make_label("G", {"graph neural network"}, ""),
                         pc::make_label("C", {"calprotectin", "leukocyte l1 antigen complex"}, "")});
  const auto idx = pc::build_name_index(ls);
  const auto got = ids(ls, pc::retrieve_candidates(paper("A graph neural network", "of leukocyte L1 antigen complex"), idx));
  EXPECT_EQ(got, (std::vector<std::string>{"C", "G", "N"}));
}

TEST(Retrieve, ScopeSelectsBody) {
  const auto ls = space({pc::make_label("V", {"voronoi diagram"}, "")});
  const auto idx = pc::build_name_index(ls);
  const auto p = paper("t", "a", {"this body paragraph mentions a voronoi diagram and has enough words"});
  EXPECT_TRUE(pc::retrieve_candidates(p, idx).empty());
  EXPECT_EQ(pc::retrieve_candidates(p, idx, pc::MatchScope::full_text).size(), 1u);
}

TEST(Retrieve, PositionAndCaseInvariant) {
  pc::Rng rng(6);
  std::vector<pc::Label> labels;
  for (int l = 0; l < 20; ++l)
    labels.push_back(pc::make_label("L" + std::to_string(l), {"name" + std::to_string(l) + " term" + std::to_string(l)}, ""));
  const auto ls = space(labels);
  const auto idx = pc::build_name_index(ls);
  for (int trial = 0; trial < 50; ++trial) {
    const auto l = pc::uniform_index(rng, ls.size());
    std::string name = ls.labels[l].names[0];
    std::string upper = name;
    for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const auto a = pc::retrieve_candidates(paper(name, words(8)), idx);
    const auto b = pc::retrieve_candidates(paper("", words(3) + " " + upper + " " + words(4, "z")), idx);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, std::vector<std::size_t>{l});
  }
}

TEST(CandidateStats, Arithmetic) {
  const auto s = pc::candidate_stats({{0, 1, 2}, {}, {3, 4, 5}});
  EXPECT_DOUBLE_EQ(s.mean_candidates, 2.0);
  EXPECT_EQ(s.empty_papers, 1u);
  EXPECT_EQ(s.total_candidates, 6u);
}

TEST(CandidateStats, AllEmptyWarns) {
  testutil::WarningCapture w;
  const auto s = pc::candidate_stats({{}, {}});
  EXPECT_EQ(s.mean_candidates, 0.0);
  EXPECT_EQ(s.empty_papers, 2u);
  EXPECT_EQ(w.messages.size(), 1u);
}

TEST(Retrieve, SyntheticAbstractNamesAreAllRecovered) {
  pc::SyntheticSpec spec;
  spec.papers = 120;
  spec.labels = 20;
  const auto syn = pc::generate_synthetic(spec);
  const auto corpus = pc::corpus_from_records(syn.papers);
  const auto labels = pc::labels_from_records(syn.labels);
  const auto idx = pc::build_name_index(labels);
  const auto sets = pc::retrieve_all(corpus, idx);
  std::size_t planted = 0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    // Planted names are the only label names in the title+abstract.
    EXPECT_EQ(ids(labels, sets[d]), syn.abstract_labels[d]);
    planted += syn.abstract_labels[d].size();
  }
  EXPECT_DOUBLE_EQ(pc::candidate_stats(sets).mean_candidates,
                   static_cast<double>(planted) / static_cast<double>(corpus.size()));
}

TEST(CandidateDump, RoundTrip) {
  const auto ls = space({pc::make_label("A", {"alpha"}, ""), pc::make_label("B", {"beta"}, "")});
  const auto corpus = pc::corpus_from_records({paper_record("p1", {}, {}, "alpha beta"), paper_record("p2", {}, {}, "none")});
  const auto sets = pc::retrieve_all(corpus, pc::build_name_index(ls));
  std::stringstream ss;
  pc::write_candidates(ss, corpus, ls, sets);
  EXPECT_EQ(ss.str(), "{\"paper_id\":\"p1\",\"candidates\":[\"A\",\"B\"]}\n{\"paper_id\":\"p2\",\"candidates\":[]}\n");
  EXPECT_EQ(pc::read_candidates(ss, corpus, ls), sets);
}
