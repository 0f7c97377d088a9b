// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "helpers.hpp"

namespace pc = paperclf;
using testutil::json;
using testutil::paper_record;
using testutil::words;

namespace {
pc::Corpus load(const std::vector<json>& records, std::size_t min_words = 10) {
  std::stringstream ss;
  pc::write_jsonl(ss, records);
  return pc::load_corpus(ss, min_words);
}
}  // namespace

TEST(LoadCorpus, ShortParagraphsAreFiltered) {
  const auto c = load({paper_record("A", {words(4), words(12), words(30)}, {}, "t", "a b")});
  const auto& p = c.papers.at(0);
  EXPECT_EQ(p.body_paragraph_count(), 2u);
  EXPECT_FALSE(p.empty);
  EXPECT_EQ(c.stats.removed_paragraphs, 1u);
  EXPECT_EQ(c.stats.body_paragraphs, 2u);
}

TEST(LoadCorpus, AllShortParagraphsFlagEmpty) {
  const auto c = load({paper_record("A", {words(3), words(9)}, {}, "Title", "Abstract text")});
  const auto& p = c.papers.at(0);
  EXPECT_TRUE(p.empty);
  EXPECT_EQ(p.body_paragraph_count(), 0u);
  // The emptied section is pruned; only the title+abstract leaf is left.
  ASSERT_EQ(p.hierarchy.children.size(), 1u);
  EXPECT_TRUE(p.hierarchy.children[0].is_abstract);
  EXPECT_EQ(c.stats.empty_papers, 1u);
}

TEST(LoadCorpus, AbstractIsFirstLeafAndExemptFromFilter) {
  const auto c = load({paper_record("A", {words(15)}, {}, "Short", "title")});
  const auto ls = c.papers[0].leaves();
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_TRUE(ls[0]->is_abstract);
  EXPECT_EQ(ls[0]->text, "Short\ntitle");
  EXPECT_FALSE(ls[1]->is_abstract);
}

TEST(LoadCorpus, NestedSubsectionsArePrunedWhenEmptied) {
  json r;
  r["id"] = "A";
  r["sections"] = json::array({json{{"name", "s1"},
                                    {"paragraphs", json::array({words(10)})},
                                    {"subsections", json::array({json{{"name", "keep"}, {"paragraphs", json::array({words(11)})}},
                                                                 json{{"name", "drop"}, {"paragraphs", json::array({words(2)})}}})}}});
  const auto c = load({r});
  const auto& root = c.papers[0].hierarchy;
  ASSERT_EQ(root.children.size(), 1u);
  const auto& s1 = root.children[0];
  EXPECT_EQ(s1.kind, pc::NodeKind::section);
  ASSERT_EQ(s1.children.size(), 2u);
  EXPECT_TRUE(s1.children[0].is_leaf());
  EXPECT_EQ(s1.children[1].kind, pc::NodeKind::subsection);
  EXPECT_EQ(s1.children[1].name, "keep");
}

TEST(LoadCorpus, MalformedLineNamesLineNumber) {
  std::stringstream ss;
  ss << paper_record("A", {words(10)}).dump() << "\n\n{not json\n";
  try {
    pc::load_corpus(ss, 10);
    FAIL() << "expected LoadError";
  } catch (const pc::LoadError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST(LoadCorpus, DuplicateIdIsAnError) {
  EXPECT_THROW(load({paper_record("A", {words(10)}), paper_record("A", {words(10)})}), pc::LoadError);
}

TEST(LoadCorpus, MissingIdIsAnError) {
  json r = paper_record("A", {words(10)});
  r.erase("id");
  EXPECT_THROW(load({r}), pc::LoadError);
}

TEST(LoadCorpus, EveryLeafMeetsThresholdOnRandomCorpora) {
  pc::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<json> recs;
    for (int d = 0; d < 10; ++d) {
      std::vector<std::string> paras;
      for (std::size_t i = 0; i < 1 + pc::uniform_index(rng, 6); ++i) paras.push_back(words(pc::uniform_index(rng, 20)));
      recs.push_back(paper_record("P" + std::to_string(d), paras, {}, "t", "abs"));
    }
    const std::size_t thr = 1 + pc::uniform_index(rng, 15);
    const auto c = load(recs, thr);
    std::size_t kept = 0;
    for (const auto& p : c.papers) {
      for (auto i : p.body_leaf_indices()) EXPECT_GE(pc::count_tokens(p.leaves()[i]->text), thr);
      kept += p.body_paragraph_count();
      EXPECT_EQ(p.empty, p.body_paragraph_count() == 0);
    }
    EXPECT_EQ(kept, c.stats.body_paragraphs);
  }
}

TEST(LoadLabels, SingleAndMultiName) {
  std::stringstream ss;
  ss << json{{"id", "D000085686"}, {"names", {"deltacoronavirus"}}, {"description", "A genus of viruses"}}.dump() << "\n"
     << json{{"id", "D016207"}, {"names", json::array({"leukocyte l1 antigen complex", "calprotectin"})}, {"description", ""}}.dump()
     << "\n";
  const auto labels = pc::load_labels(ss);
  ASSERT_EQ(labels.size(), 2u);
  // Sorted by id.
  EXPECT_EQ(labels.labels[0].id, "D000085686");
  EXPECT_EQ(labels.labels[0].names.size(), 1u);
  EXPECT_EQ(labels.labels[0].text(), "deltacoronavirus\nA genus of viruses");
  const auto& multi = labels.labels[1];
  ASSERT_EQ(multi.name_tokens.size(), 2u);
  EXPECT_EQ(multi.name_tokens[0], (std::vector<std::string>{"leukocyte", "l1", "antigen", "complex"}));
  EXPECT_EQ(multi.name_tokens[1], (std::vector<std::string>{"calprotectin"}));
  EXPECT_EQ(labels.index_of("D016207"), std::optional<std::size_t>(1));
  EXPECT_FALSE(labels.index_of("nope").has_value());
}

TEST(LoadLabels, EmptyFileWarns) {
  testutil::WarningCapture w;
  std::stringstream ss;
  const auto labels = pc::load_labels(ss);
  EXPECT_TRUE(labels.empty());
  EXPECT_EQ(w.messages.size(), 1u);
}

TEST(LoadLabels, DuplicateIdAndZeroNamesAreErrors) {
  std::stringstream dup;
  dup << json{{"id", "x"}, {"names", {"a"}}}.dump() << "\n" << json{{"id", "x"}, {"names", {"b"}}}.dump() << "\n";
  EXPECT_THROW(pc::load_labels(dup), pc::LoadError);
  std::stringstream none;
  none << json{{"id", "x"}, {"names", json::array()}}.dump() << "\n";
  EXPECT_THROW(pc::load_labels(none), pc::LoadError);
  std::stringstream blank;
  blank << json{{"id", "x"}, {"names", {" -- "}}}.dump() << "\n";
  EXPECT_THROW(pc::load_labels(blank), pc::LoadError);
}

TEST(Vocabulary, ThresholdBoundary) {
  const auto c = load({paper_record("A", {"graph " + words(10)}), paper_record("B", {"graph " + words(10, "v")})});
  const auto v = pc::build_vocabulary(c.papers, 2);
  const auto* e = v.find("graph");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->df, 2u);
  EXPECT_EQ(v.num_docs, 2u);
  EXPECT_EQ(v.find("w0"), nullptr);
}

TEST(Vocabulary, BelowThresholdDropped) {
  std::vector<json> recs;
  for (int d = 0; d < 100; ++d) recs.push_back(paper_record("P" + std::to_string(d), {(d < 4 ? "rare " : "") + words(10)}));
  const auto v = pc::build_vocabulary(load(recs).papers, 5);
  EXPECT_EQ(v.find("rare"), nullptr);
  ASSERT_NE(v.find("w3"), nullptr);
  EXPECT_EQ(v.find("w3")->df, 100u);
}

TEST(Vocabulary, AllUniqueWordsGiveEmptyVocabularyWithWarning) {
  std::vector<json> recs;
  for (int d = 0; d < 6; ++d) recs.push_back(paper_record("P" + std::to_string(d), {words(10, "u" + std::to_string(d) + "x")}));
  testutil::WarningCapture w;
  const auto v = pc::build_vocabulary(load(recs).papers, 5);
  EXPECT_EQ(v.size(), 0u);
  EXPECT_FALSE(w.messages.empty());
}

TEST(Vocabulary, EmptyCorpusIsAnError) { EXPECT_THROW(pc::build_vocabulary({}, 1), pc::Error); }

TEST(Vocabulary, DocumentFrequencyMatchesBruteForce) {
  pc::Rng rng(9);
  std::vector<json> recs;
  for (int d = 0; d < 30; ++d) {
    std::string para;
    for (int i = 0; i < 12; ++i) para += "t" + std::to_string(pc::uniform_index(rng, 25)) + " ";
    recs.push_back(paper_record("P" + std::to_string(d), {para}, {}, "", "t" + std::to_string(pc::uniform_index(rng, 25))));
  }
  const auto c = load(recs);
  const auto v = pc::build_vocabulary(c.papers, 3);
  std::map<std::string, std::size_t> brute;
  for (const auto& p : c.papers) {
    std::set<std::string> uniq;
    for (const auto* leaf : p.leaves())
      for (const auto& t : pc::tokenize(leaf->text)) uniq.insert(t);
    for (const auto& t : uniq) ++brute[t];
  }
  std::size_t retained = 0;
  for (const auto& [w, n] : brute) {
    const auto* e = v.find(w);
    if (n >= 3) {
      ASSERT_NE(e, nullptr) << w;
      EXPECT_EQ(e->df, n) << w;
      EXPECT_EQ(v.words.at(e->index), w);
      ++retained;
    } else {
      EXPECT_EQ(e, nullptr) << w;
    }
  }
  EXPECT_EQ(retained, v.size());
}
