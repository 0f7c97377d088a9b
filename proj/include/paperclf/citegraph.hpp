// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "corpus.hpp"

namespace paperclf {

/// Directed citation network over the corpus papers (indexed as in Corpus).
struct CitationGraph {
  std::vector<std::string> ids;
  std::vector<std::vector<std::size_t>> out_edges;  // sorted
  std::vector<std::vector<std::size_t>> in_edges;   // sorted
  std::size_t dangling_refs = 0;
  std::size_t self_loops = 0;

  std::size_t size() const noexcept { return ids.size(); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& e : out_edges) n += e.size();
    return n;
  }
};

/// An edge d_i -> d_j exists iff d_j is in d_i's bib_refs and in the corpus.
/// References to unknown papers are dropped and counted; self-citations too.
inline CitationGraph build_graph(const Corpus& corpus) {
  CitationGraph g;
  const std::size_t n = corpus.size();
  g.ids.reserve(n);
  for (const auto& p : corpus.papers) g.ids.push_back(p.id);
  g.out_edges.resize(n);
  g.in_edges.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& ref : corpus.papers[i].bib_refs) {
      auto it = corpus.by_id.find(ref);
      if (it == corpus.by_id.end()) {
        ++g.dangling_refs;
        continue;
      }
      if (it->second == i) {
        ++g.self_loops;
        continue;
      }
      g.out_edges[i].push_back(it->second);
      g.in_edges[it->second].push_back(i);
    }
  }
  for (auto& e : g.out_edges) std::sort(e.begin(), e.end());
  for (auto& e : g.in_edges) std::sort(e.begin(), e.end());
  if (g.dangling_refs) warn("citation graph: dropped " + std::to_string(g.dangling_refs) + " dangling reference(s)");
  return g;
}

/// A meta-path as a sequence of edge traversals: forward follows a
/// citation (P->P), backward follows it in reverse (P<-P).
struct MetaPath {
  enum class Step { forward, backward };
  std::vector<Step> steps;

  static MetaPath cites() { return {{Step::forward}}; }
  static MetaPath co_citing() { return {{Step::forward, Step::backward}}; }

  std::string name() const {
    std::string s = "P";
    for (auto st : steps) s += st == Step::forward ? "->P" : "<-P";
    return s;
  }

  /// Accepts "P->P", "P->P<-P" (and any longer well-formed pattern).
  static MetaPath parse(const std::string& text) {
    MetaPath m;
    std::size_t i = 0;
    if (text.empty() || text[0] != 'P') throw ConfigError("bad meta-path '" + text + "'");
    i = 1;
    while (i < text.size()) {
      if (text.compare(i, 3, "->P") == 0) {
        m.steps.push_back(Step::forward);
      } else if (text.compare(i, 3, "<-P") == 0) {
        m.steps.push_back(Step::backward);
      } else {
        throw ConfigError("bad meta-path '" + text + "'");
      }
      i += 3;
    }
    if (m.steps.empty()) throw ConfigError("meta-path '" + text + "' has no steps");
    return m;
  }

  bool operator==(const MetaPath&) const = default;
};

/// N_M(d): papers reachable from d along the meta-path, excluding d. Sorted.
inline std::vector<std::size_t> neighborhood(const CitationGraph& g, std::size_t d, const MetaPath& m) {
  if (d >= g.size()) throw Error("neighborhood: paper index out of range");
  if (m.steps.empty()) throw Error("neighborhood: empty meta-path");
  std::vector<std::size_t> frontier{d};
  for (auto step : m.steps) {
    std::vector<std::size_t> next;
    for (auto u : frontier) {
      const auto& adj = step == MetaPath::Step::forward ? g.out_edges[u] : g.in_edges[u];
      next.insert(next.end(), adj.begin(), adj.end());
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  frontier.erase(std::remove(frontier.begin(), frontier.end(), d), frontier.end());
  return frontier;
}

inline std::vector<std::string> neighborhood(const CitationGraph& g, const std::string& id, const MetaPath& m) {
  auto it = std::find(g.ids.begin(), g.ids.end(), id);
  if (it == g.ids.end()) throw Error("neighborhood: unknown paper id '" + id + "'");
  std::vector<std::string> out;
  for (auto j : neighborhood(g, static_cast<std::size_t>(it - g.ids.begin()), m)) out.push_back(g.ids[j]);
  std::sort(out.begin(), out.end());
  return out;
}

struct ParagraphRef {
  std::size_t paper = 0;  // corpus index
  std::size_t leaf = 0;   // index into Paper::leaves()
  bool operator==(const ParagraphRef&) const = default;
};

struct ContrastiveTuple {
  ParagraphRef anchor;
  ParagraphRef positive;
  ParagraphRef negative;
  bool operator==(const ContrastiveTuple&) const = default;
};

/// Draws `count` (p, p+, p-) tuples with replacement. Anchors are uniform over
/// papers that have a body paragraph and a nonempty neighborhood; positives
/// are uniform over the anchor's neighbors, negatives uniform over the other
/// papers; paragraphs are uniform over each paper's body paragraphs. Papers
/// without body paragraphs never take part.
inline std::vector<ContrastiveTuple> sample_tuples(const CitationGraph& g, const Corpus& corpus, const MetaPath& m,
                                                   std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error("sample_tuples: count must be positive");
  if (g.size() != corpus.size()) throw Error("sample_tuples: graph and corpus disagree");
  const std::size_t n = corpus.size();

  std::vector<std::vector<std::size_t>> body(n);
  std::vector<std::size_t> with_text;
  for (std::size_t i = 0; i < n; ++i) {
    body[i] = corpus.papers[i].body_leaf_indices();
    if (!body[i].empty()) with_text.push_back(i);
  }

  struct Anchor {
    std::size_t paper;
    std::vector<std::size_t> positives;  // neighbors with body text
    std::vector<std::size_t> neighbors;  // full N_M(d), sorted
    std::size_t outside;                 // eligible negatives
  };
  std::vector<Anchor> anchors;
  for (auto i : with_text) {
    auto nb = neighborhood(g, i, m);
    std::vector<std::size_t> pos;
    for (auto j : nb)
      if (!body[j].empty()) pos.push_back(j);
    if (pos.empty()) continue;
    const std::size_t outside = with_text.size() - 1 - pos.size();
    if (outside == 0) continue;
    anchors.push_back({i, std::move(pos), std::move(nb), outside});
  }
  if (anchors.empty()) throw Error("graph too sparse for meta-path " + m.name());

  Rng rng(seed);
  std::vector<ContrastiveTuple> tuples;
  tuples.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const Anchor& a = anchors[uniform_index(rng, anchors.size())];
    const std::size_t pos = a.positives[uniform_index(rng, a.positives.size())];
    auto excluded = [&](std::size_t j) {
      return j == a.paper || std::binary_search(a.neighbors.begin(), a.neighbors.end(), j);
    };
    // Rejection first; if the complement is small, select its k-th member.
    std::size_t neg = n;
    for (int attempt = 0; attempt < 32 && neg == n; ++attempt) {
      const std::size_t j = with_text[uniform_index(rng, with_text.size())];
      if (!excluded(j)) neg = j;
    }
    if (neg == n) {
      std::size_t k = uniform_index(rng, a.outside);
      for (auto j : with_text) {
        if (excluded(j)) continue;
        if (k-- == 0) {
          neg = j;
          break;
        }
      }
    }
    auto pick = [&](std::size_t paper) { return ParagraphRef{paper, body[paper][uniform_index(rng, body[paper].size())]}; };
    ContrastiveTuple tuple;
    tuple.anchor = pick(a.paper);
    tuple.positive = pick(pos);
    tuple.negative = pick(neg);
    tuples.push_back(tuple);
  }
  return tuples;
}

// ---------------------------------------------------------------------------
// Tuple export: {"anchor": [paper_id, leaf_idx], "positive": [...], "negative": [...]}

inline void write_tuples(std::ostream& out, const std::vector<ContrastiveTuple>& tuples, const Corpus& corpus) {
  auto ref = [&](const ParagraphRef& r) { return nlohmann::json::array({corpus.papers[r.paper].id, r.leaf}); };
  for (const auto& t : tuples) {
    nlohmann::json j;
    j["anchor"] = ref(t.anchor);
    j["positive"] = ref(t.positive);
    j["negative"] = ref(t.negative);
    out << j.dump() << '\n';
  }
}

inline std::vector<ContrastiveTuple> read_tuples(std::istream& in, const Corpus& corpus,
                                                 const std::string& path = "<stream>") {
  std::vector<ContrastiveTuple> tuples;
  std::string line;
  std::size_t lineno = 0;
  auto ref = [&](const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_number_unsigned())
      throw LoadError(path, lineno, "paragraph reference must be [paper_id, leaf_idx]");
    const Paper* p = corpus.find(j[0].get<std::string>());
    if (!p) throw LoadError(path, lineno, "unknown paper id '" + j[0].get<std::string>() + "'");
    const auto leaf = j[1].get<std::size_t>();
    if (leaf >= p->leaves().size()) throw LoadError(path, lineno, "leaf index out of range");
    return ParagraphRef{corpus.by_id.at(p->id), leaf};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("anchor") || !j.contains("positive") || !j.contains("negative"))
      throw LoadError(path, lineno, "tuple needs anchor, positive and negative");
    tuples.push_back({ref(j["anchor"]), ref(j["positive"]), ref(j["negative"])});
  }
  return tuples;
}

}  // namespace paperclf
