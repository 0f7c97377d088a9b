// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "corpus.hpp"

namespace paperclf {

/// Planted-label corpus parameters.
struct SyntheticSpec {
  std::size_t papers = 500;
  std::size_t labels = 50;
  std::size_t labels_per_paper = 3;
  double full_text_only_fraction = 1.0 / 3.0;
  std::size_t vocabulary = 2000;  // filler words
  std::size_t topic_words = 10;   // per label
  std::size_t paragraph_words = 30;
  double citation_probability = 0.03;  // per pair of papers sharing a label
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<nlohmann::json> papers;  // corpus records, gold labels included
  std::vector<nlohmann::json> labels;  // label records
  // Per paper, label ids whose names are planted in the title/abstract and
  // those planted only in the body.
  std::vector<std::vector<std::string>> abstract_labels;
  std::vector<std::vector<std::string>> full_text_only_labels;
};

namespace detail {

// Pronounceable pseudo-words. Filler starts with a consonant from `kCons`,
// label names with 'q' and topic words with 'x', so the three pools never
// overlap.
inline constexpr std::string_view kCons = "bdfgklmnprstvz";
inline constexpr std::string_view kVowels = "aeiou";

inline std::string pseudo_word(Rng& rng, std::size_t syllables, std::string prefix = {}) {
  std::string w = std::move(prefix);
  for (std::size_t s = 0; s < syllables; ++s) {
    w.push_back(kCons[uniform_index(rng, kCons.size())]);
    w.push_back(kVowels[uniform_index(rng, kVowels.size())]);
  }
  return w;
}

inline std::vector<std::string> unique_words(Rng& rng, std::size_t n, std::size_t syllables, const std::string& prefix,
                                             std::set<std::string>& taken) {
  std::vector<std::string> out;
  while (out.size() < n) {
    auto w = pseudo_word(rng, syllables, prefix);
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

// `n` words: fraction `topic_share` from `topic`, the rest from `filler`, shuffled.
inline std::string mixed_text(Rng& rng, std::size_t n, const std::vector<std::string>& filler,
                              const std::vector<std::string>& topic, double topic_share) {
  std::vector<std::string> words;
  const auto n_topic = topic.empty() ? 0 : static_cast<std::size_t>(std::lround(static_cast<double>(n) * topic_share));
  for (std::size_t i = 0; i < n_topic; ++i) words.push_back(topic[uniform_index(rng, topic.size())]);
  while (words.size() < n) words.push_back(filler[uniform_index(rng, filler.size())]);
  shuffle(words, rng);
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

inline std::string label_id(std::size_t l, std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::string s = std::to_string(l);
  return "L" + std::string(width - std::min(width, s.size()), '0') + s;
}

inline std::string paper_id(std::size_t d, std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::string s = std::to_string(d);
  return "P" + std::string(width - std::min(width, s.size()), '0') + s;
}

}  // namespace detail

/// Papers carry `labels_per_paper` relevant labels. Names of a fraction of
/// them appear verbatim only in body paragraphs; the others in the abstract.
/// Each label's sections are dense in its own topic words. Papers sharing a
/// label cite each other with the configured probability (later cites earlier).
inline SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.labels == 0 || spec.papers == 0) throw ConfigError("synthetic corpus needs papers and labels");
  if (spec.labels_per_paper == 0 || spec.labels_per_paper > spec.labels)
    throw ConfigError("labels per paper must be in [1, label count]");
  if (spec.full_text_only_fraction < 0.0 || spec.full_text_only_fraction > 1.0)
    throw ConfigError("full-text-only fraction must be in [0, 1]");
  if (spec.paragraph_words < 10) throw ConfigError("synthetic paragraphs need at least 10 words");

  Rng rng(derive_seed(spec.seed, "synth"));
  std::set<std::string> taken;
  const auto filler = detail::unique_words(rng, spec.vocabulary, 3, "", taken);

  SyntheticCorpus out;
  std::vector<std::string> names(spec.labels);
  std::vector<std::vector<std::string>> topics(spec.labels);
  for (std::size_t l = 0; l < spec.labels; ++l) {
    const auto nw = detail::unique_words(rng, 2, 2, "q", taken);
    names[l] = nw[0] + " " + nw[1];
    topics[l] = detail::unique_words(rng, spec.topic_words, 2, "x", taken);
    std::string desc;
    for (const auto& w : topics[l]) desc += (desc.empty() ? "" : " ") + w;
    out.labels.push_back({{"id", detail::label_id(l, spec.labels)}, {"names", nlohmann::json::array({names[l]})}, {"description", desc}});
  }

  const auto n_hidden = static_cast<std::size_t>(
      std::lround(static_cast<double>(spec.labels_per_paper) * spec.full_text_only_fraction));
  const std::size_t W = spec.paragraph_words;
  std::vector<std::vector<std::size_t>> paper_labels(spec.papers);
  for (std::size_t d = 0; d < spec.papers; ++d) {
    std::vector<std::size_t> all(spec.labels);
    for (std::size_t l = 0; l < spec.labels; ++l) all[l] = l;
    shuffle(all, rng);
    std::vector<std::size_t> mine(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(spec.labels_per_paper));
    // The first n_hidden labels of `mine` are body-only.
    std::vector<std::size_t> hidden(mine.begin(), mine.begin() + static_cast<std::ptrdiff_t>(n_hidden));
    std::vector<std::size_t> shown(mine.begin() + static_cast<std::ptrdiff_t>(n_hidden), mine.end());

    std::string abstract = detail::mixed_text(rng, W, filler, {}, 0.0);
    for (auto l : shown) {
      abstract += " " + names[l] + " " + detail::mixed_text(rng, 6, filler, topics[l], 0.5);
    }
    nlohmann::json sections = nlohmann::json::array();
    std::size_t sec_no = 0;
    for (auto l : mine) {
      const bool body_only = std::find(hidden.begin(), hidden.end(), l) != hidden.end();
      std::string first = detail::mixed_text(rng, W, filler, topics[l], 0.4);
      if (body_only) first = names[l] + " " + first;
      nlohmann::json sub = {{"name", "details"},
                            {"paragraphs", nlohmann::json::array({detail::mixed_text(rng, W, filler, topics[l], 0.4)})}};
      sections.push_back({{"name", "section " + std::to_string(++sec_no)},
                          {"paragraphs", nlohmann::json::array({first, detail::mixed_text(rng, W, filler, topics[l], 0.4)})},
                          {"subsections", nlohmann::json::array({sub})}});
    }
    sections.push_back({{"name", "conclusion"}, {"paragraphs", nlohmann::json::array({detail::mixed_text(rng, W, filler, {}, 0.0)})}});

    std::vector<std::string> gold;
    for (auto l : mine) gold.push_back(detail::label_id(l, spec.labels));
    std::sort(gold.begin(), gold.end());
    std::vector<std::string> ab, hid;
    for (auto l : shown) ab.push_back(detail::label_id(l, spec.labels));
    for (auto l : hidden) hid.push_back(detail::label_id(l, spec.labels));
    std::sort(ab.begin(), ab.end());
    std::sort(hid.begin(), hid.end());

    out.papers.push_back({{"id", detail::paper_id(d, spec.papers)},
                          {"title", detail::mixed_text(rng, 6, filler, {}, 0.0)},
                          {"abstract", abstract},
                          {"sections", sections},
                          {"bib_refs", nlohmann::json::array()},
                          {"labels", gold}});
    out.abstract_labels.push_back(std::move(ab));
    out.full_text_only_labels.push_back(std::move(hid));
    std::sort(mine.begin(), mine.end());
    paper_labels[d] = std::move(mine);
  }

  for (std::size_t j = 0; j < spec.papers; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      std::vector<std::size_t> common;
      std::set_intersection(paper_labels[i].begin(), paper_labels[i].end(), paper_labels[j].begin(),
                            paper_labels[j].end(), std::back_inserter(common));
      if (common.empty()) continue;
      if (uniform_real(rng) < spec.citation_probability)
        out.papers[j]["bib_refs"].push_back(detail::paper_id(i, spec.papers));
    }
  }
  return out;
}

/// Two equal clusters with disjoint topical vocabularies. Every paper cites
/// two of its cluster's three hub papers and each hub cites the other two, so
/// under P->P<-P a paper's neighborhood is its whole cluster.
inline std::vector<nlohmann::json> generate_two_cluster(std::size_t papers, std::uint64_t seed,
                                                        std::size_t paragraph_words = 30) {
  if (papers < 8) throw ConfigError("two-cluster corpus needs at least 8 papers");
  Rng rng(derive_seed(seed, "two-cluster"));
  std::set<std::string> taken;
  const auto filler = detail::unique_words(rng, 1000, 3, "", taken);
  const std::vector<std::vector<std::string>> topic = {detail::unique_words(rng, 150, 2, "x", taken),
                                                       detail::unique_words(rng, 150, 2, "q", taken)};
  std::vector<std::vector<std::size_t>> members(2);
  for (std::size_t d = 0; d < papers; ++d) members[d % 2].push_back(d);

  std::vector<nlohmann::json> out;
  for (std::size_t d = 0; d < papers; ++d) {
    const std::size_t c = d % 2;
    const auto& hubs = members[c];  // first three members act as hubs
    nlohmann::json refs = nlohmann::json::array();
    const auto pos = static_cast<std::size_t>(std::find(hubs.begin(), hubs.end(), d) - hubs.begin());
    if (pos < 3) {
      for (std::size_t h = 0; h < 3; ++h)
        if (h != pos) refs.push_back(detail::paper_id(hubs[h], papers));
    } else {
      const std::size_t skip = uniform_index(rng, 3);
      for (std::size_t h = 0; h < 3; ++h)
        if (h != skip) refs.push_back(detail::paper_id(hubs[h], papers));
    }
    nlohmann::json paragraphs = nlohmann::json::array();
    for (int p = 0; p < 3; ++p) paragraphs.push_back(detail::mixed_text(rng, paragraph_words, filler, topic[c], 0.5));
    out.push_back({{"id", detail::paper_id(d, papers)},
                   {"title", detail::mixed_text(rng, 6, filler, topic[c], 0.5)},
                   {"abstract", detail::mixed_text(rng, paragraph_words, filler, topic[c], 0.5)},
                   {"sections", nlohmann::json::array({{{"name", "body"}, {"paragraphs", paragraphs}}})},
                   {"bib_refs", refs}});
  }
  return out;
}

inline void write_jsonl(std::ostream& out, const std::vector<nlohmann::json>& records) {
  for (const auto& r : records) out << r.dump() << '\n';
}

inline void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_jsonl(out, records);
}

/// In-memory corpus from generated records.
inline Corpus corpus_from_records(const std::vector<nlohmann::json>& records, std::size_t min_paragraph_words = 10) {
  std::string buf;
  for (const auto& r : records) buf += r.dump() + '\n';
  std::istringstream in(buf);
  return load_corpus(in, min_paragraph_words, "<synthetic>");
}

inline LabelSpace labels_from_records(const std::vector<nlohmann::json>& records) {
  std::string buf;
  for (const auto& r : records) buf += r.dump() + '\n';
  std::istringstream in(buf);
  return load_labels(in, "<synthetic>");
}

}  // namespace paperclf
