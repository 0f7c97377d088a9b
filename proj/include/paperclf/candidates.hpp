// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "corpus.hpp"
#include "text.hpp"

namespace paperclf {

/// Normalized name token sequence -> labels carrying that name.
class NameIndex {
 public:
  NameIndex() = default;

  explicit NameIndex(const LabelSpace& labels) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      for (const auto& toks : labels.labels[l].name_tokens) {
        auto& ids = keys_[join_tokens(toks)];
        if (std::find(ids.begin(), ids.end(), l) == ids.end()) ids.push_back(l);
        max_len_ = std::max(max_len_, toks.size());
      }
    }
    for (auto& [key, ids] : keys_) std::sort(ids.begin(), ids.end());
  }

  std::size_t max_name_length() const noexcept { return max_len_; }
  std::size_t key_count() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  const std::vector<std::size_t>* lookup(const std::string& normalized_name) const {
    auto it = keys_.find(normalized_name);
    return it == keys_.end() ? nullptr : &it->second;
  }

  /// Labels with a name occurring as a contiguous run of `tokens`, ascending.
  std::vector<std::size_t> match(const std::vector<std::string>& tokens) const {
    std::vector<std::size_t> out;
    std::string key;
    for (std::size_t start = 0; start < tokens.size(); ++start) {
      key.clear();
      for (std::size_t len = 1; len <= max_len_ && start + len <= tokens.size(); ++len) {
        if (len > 1) key.push_back(' ');
        key += tokens[start + len - 1];
        if (auto it = keys_.find(key); it != keys_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::unordered_map<std::string, std::vector<std::size_t>> keys_;
  std::size_t max_len_ = 0;
};

inline NameIndex build_name_index(const LabelSpace& labels) { return NameIndex(labels); }

enum class MatchScope { title_abstract, full_text };

/// C(d): label indices (ascending, i.e. label id order) whose name appears
/// verbatim in the paper's title+abstract, or its full text for ablations.
inline std::vector<std::size_t> retrieve_candidates(const Paper& paper, const NameIndex& index,
                                                    MatchScope scope = MatchScope::title_abstract) {
  const std::string text = scope == MatchScope::title_abstract ? paper.title_abstract() : paper.full_text();
  return index.match(tokenize(text));
}

/// Per paper (corpus order) candidate label indices.
using CandidateSets = std::vector<std::vector<std::size_t>>;

inline CandidateSets retrieve_all(const Corpus& corpus, const NameIndex& index,
                                  MatchScope scope = MatchScope::title_abstract) {
  CandidateSets out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.papers) out.push_back(retrieve_candidates(p, index, scope));
  return out;
}

struct CandidateStats {
  double mean_candidates = 0.0;  // lambda
  std::size_t total_candidates = 0;
  std::size_t empty_papers = 0;
  std::size_t papers = 0;
};

inline CandidateStats candidate_stats(const CandidateSets& sets) {
  CandidateStats s;
  s.papers = sets.size();
  for (const auto& c : sets) {
    s.total_candidates += c.size();
    if (c.empty()) ++s.empty_papers;
  }
  if (s.papers) s.mean_candidates = static_cast<double>(s.total_candidates) / static_cast<double>(s.papers);
  if (s.total_candidates == 0) warn("no paper received any candidate label");
  return s;
}

// ---------------------------------------------------------------------------
// Candidate dump: {"paper_id": ..., "candidates": [label_id, ...]}

inline void write_candidates(std::ostream& out, const Corpus& corpus, const LabelSpace& labels,
                             const CandidateSets& sets) {
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    nlohmann::ordered_json j;
    j["paper_id"] = corpus.papers[d].id;
    auto& arr = j["candidates"] = nlohmann::ordered_json::array();
    for (auto l : sets[d]) arr.push_back(labels.labels[l].id);
    out << j.dump() << '\n';
  }
}

inline CandidateSets read_candidates(std::istream& in, const Corpus& corpus, const LabelSpace& labels,
                                     const std::string& path = "<stream>") {
  CandidateSets sets(corpus.size());
  std::vector<char> seen(corpus.size(), 0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    const auto id = j.value("paper_id", std::string());
    auto it = corpus.by_id.find(id);
    if (it == corpus.by_id.end()) throw LoadError(path, lineno, "unknown paper id '" + id + "'");
    std::vector<std::size_t> c;
    for (const auto& lid : j.value("candidates", nlohmann::json::array())) {
      auto idx = labels.index_of(lid.get<std::string>());
      if (!idx) throw LoadError(path, lineno, "unknown label id '" + lid.get<std::string>() + "'");
      c.push_back(*idx);
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    sets[it->second] = std::move(c);
    seen[it->second] = 1;
  }
  for (std::size_t d = 0; d < corpus.size(); ++d)
    if (!seen[d]) throw LoadError(path, 0, "no candidate record for paper '" + corpus.papers[d].id + "'");
  return sets;
}

}  // namespace paperclf
