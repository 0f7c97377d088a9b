// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "text.hpp"

namespace paperclf {

enum class NodeKind { paper, section, subsection, paragraph };

/// One unit of a paper's hierarchy. Internal nodes own their children;
/// paragraph leaves carry the text.
struct HierarchyNode {
  NodeKind kind = NodeKind::paper;
  std::string name;  // section heading, empty for paragraphs and the root
  std::string text;  // nonempty iff kind == paragraph
  bool is_abstract = false;
  std::vector<HierarchyNode> children;

  bool is_leaf() const noexcept { return kind == NodeKind::paragraph; }
};

namespace detail {
inline void collect_leaves(const HierarchyNode& node, std::vector<const HierarchyNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}
}  // namespace detail

/// Paragraph leaves in depth-first order. The title+abstract leaf, when
/// present, is always leaf 0.
inline std::vector<const HierarchyNode*> leaves(const HierarchyNode& root) {
  std::vector<const HierarchyNode*> out;
  detail::collect_leaves(root, out);
  return out;
}

struct Paper {
  std::string id;
  std::string title;
  std::string abstract;
  HierarchyNode hierarchy;
  std::vector<std::string> bib_refs;  // sorted, unique
  std::optional<std::vector<std::string>> gold_labels;
  bool empty = false;  // no body paragraph survived filtering

  /// a_d: title followed by abstract.
  std::string title_abstract() const {
    if (title.empty()) return abstract;
    if (abstract.empty()) return title;
    return title + "\n" + abstract;
  }

  std::vector<const HierarchyNode*> leaves() const { return paperclf::leaves(hierarchy); }

  /// Leaf indices (into leaves()) of body paragraphs, i.e. excluding the abstract.
  std::vector<std::size_t> body_leaf_indices() const {
    std::vector<std::size_t> out;
    const auto ls = leaves();
    for (std::size_t i = 0; i < ls.size(); ++i)
      if (!ls[i]->is_abstract) out.push_back(i);
    return out;
  }

  std::size_t body_paragraph_count() const { return body_leaf_indices().size(); }

  /// Title, abstract and every surviving paragraph.
  std::string full_text() const {
    std::string out;
    for (const auto* leaf : leaves()) {
      if (!out.empty()) out.push_back('\n');
      out += leaf->text;
    }
    return out;
  }
};

struct CorpusStats {
  std::size_t papers = 0;
  std::size_t body_paragraphs = 0;
  std::size_t removed_paragraphs = 0;
  std::size_t empty_papers = 0;

  double paragraphs_per_paper() const {
    return papers ? static_cast<double>(body_paragraphs) / static_cast<double>(papers) : 0.0;
  }
};

/// Immutable after load.
struct Corpus {
  std::vector<Paper> papers;
  std::unordered_map<std::string, std::size_t> by_id;
  CorpusStats stats;

  std::size_t size() const noexcept { return papers.size(); }

  const Paper* find(const std::string& id) const {
    auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : &papers[it->second];
  }
};

namespace detail {

struct SectionBuildResult {
  std::size_t kept = 0;
  std::size_t removed = 0;
};

inline void build_section(const nlohmann::json& sec, int depth, std::size_t min_words, HierarchyNode& parent,
                          SectionBuildResult& res, const std::string& path, std::size_t line) {
  if (!sec.is_object()) throw LoadError(path, line, "section must be an object");
  HierarchyNode node;
  node.kind = depth == 1 ? NodeKind::section : NodeKind::subsection;
  node.name = sec.value("name", std::string());
  if (auto it = sec.find("paragraphs"); it != sec.end()) {
    if (!it->is_array()) throw LoadError(path, line, "'paragraphs' must be an array");
    for (const auto& p : *it) {
      if (!p.is_string()) throw LoadError(path, line, "paragraph must be a string");
      auto text = p.get<std::string>();
      if (count_tokens(text) < min_words) {
        ++res.removed;
        continue;
      }
      HierarchyNode leaf;
      leaf.kind = NodeKind::paragraph;
      leaf.text = std::move(text);
      node.children.push_back(std::move(leaf));
      ++res.kept;
    }
  }
  if (auto it = sec.find("subsections"); it != sec.end()) {
    if (!it->is_array()) throw LoadError(path, line, "'subsections' must be an array");
    for (const auto& sub : *it) build_section(sub, depth + 1, min_words, node, res, path, line);
  }
  // Sections emptied by the filter are pruned.
  if (!node.children.empty()) parent.children.push_back(std::move(node));
}

inline std::vector<std::string> string_array(const nlohmann::json& obj, const char* key, const std::string& path,
                                             std::size_t line) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw LoadError(path, line, std::string("'") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw LoadError(path, line, std::string("'") + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

/// Parses one corpus record. The title+abstract becomes a distinguished
/// paragraph directly under the root and is exempt from the length filter.
inline Paper parse_paper(const nlohmann::json& rec, std::size_t min_paragraph_words, const std::string& path = "<memory>",
                         std::size_t line = 0, std::size_t* removed = nullptr) {
  if (!rec.is_object()) throw LoadError(path, line, "record must be a JSON object");
  auto id_it = rec.find("id");
  if (id_it == rec.end() || !id_it->is_string() || id_it->get<std::string>().empty())
    throw LoadError(path, line, "missing or empty 'id'");
  Paper paper;
  paper.id = id_it->get<std::string>();
  try {
    paper.title = rec.value("title", std::string());
    paper.abstract = rec.value("abstract", std::string());
  } catch (const nlohmann::json::exception&) {
    throw LoadError(path, line, "'title' and 'abstract' must be strings");
  }
  paper.hierarchy.kind = NodeKind::paper;

  if (const auto ta = paper.title_abstract(); count_tokens(ta) > 0) {
    HierarchyNode abs;
    abs.kind = NodeKind::paragraph;
    abs.is_abstract = true;
    abs.text = ta;
    paper.hierarchy.children.push_back(std::move(abs));
  }

  detail::SectionBuildResult res;
  if (auto it = rec.find("sections"); it != rec.end() && !it->is_null()) {
    if (!it->is_array()) throw LoadError(path, line, "'sections' must be an array");
    for (const auto& sec : *it) detail::build_section(sec, 1, min_paragraph_words, paper.hierarchy, res, path, line);
  }
  paper.empty = res.kept == 0;
  if (removed) *removed += res.removed;

  auto refs = detail::string_array(rec, "bib_refs", path, line);
  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  paper.bib_refs = std::move(refs);

  if (rec.contains("labels") && !rec.at("labels").is_null()) {
    auto labels = detail::string_array(rec, "labels", path, line);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    paper.gold_labels = std::move(labels);
  }
  return paper;
}

/// Reads a JSON Lines corpus. Blank lines are skipped.
inline Corpus load_corpus(std::istream& in, std::size_t min_paragraph_words, const std::string& path = "<stream>") {
  if (min_paragraph_words == 0) throw ConfigError("min_paragraph_words must be positive");
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    Paper paper = parse_paper(rec, min_paragraph_words, path, lineno, &corpus.stats.removed_paragraphs);
    if (!corpus.by_id.emplace(paper.id, corpus.papers.size()).second)
      throw LoadError(path, lineno, "duplicate paper id '" + paper.id + "'");
    corpus.stats.body_paragraphs += paper.body_paragraph_count();
    if (paper.empty) ++corpus.stats.empty_papers;
    corpus.papers.push_back(std::move(paper));
  }
  corpus.stats.papers = corpus.papers.size();
  return corpus;
}

inline Corpus load_corpus(const std::string& path, std::size_t min_paragraph_words) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open corpus file");
  return load_corpus(in, min_paragraph_words, path);
}

// ---------------------------------------------------------------------------
// Labels

struct Label {
  std::string id;
  std::vector<std::string> names;  // names[0] is canonical
  std::string description;
  std::vector<std::vector<std::string>> name_tokens;  // normalized, one per name

  /// t_l: canonical name followed by the description.
  std::string text() const { return description.empty() ? names.front() : names.front() + "\n" + description; }
};

/// The label space, ordered by id so that index order equals id order.
struct LabelSpace {
  std::vector<Label> labels;
  std::unordered_map<std::string, std::size_t> by_id;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = by_id.find(id);
    if (it == by_id.end()) return std::nullopt;
    return it->second;
  }
};

inline Label make_label(std::string id, std::vector<std::string> names, std::string description) {
  if (id.empty()) throw Error("label id must be nonempty");
  if (names.empty()) throw Error("label '" + id + "' has no names");
  Label label{std::move(id), std::move(names), std::move(description), {}};
  for (const auto& n : label.names) {
    auto toks = tokenize(n);
    if (toks.empty()) throw Error("label '" + label.id + "' has a name that normalizes to nothing: '" + n + "'");
    label.name_tokens.push_back(std::move(toks));
  }
  return label;
}

/// Builds a label space from labels in any order; rejects duplicate ids.
inline LabelSpace make_label_space(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end(), [](const Label& a, const Label& b) { return a.id < b.id; });
  LabelSpace space;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0 && labels[i].id == labels[i - 1].id) throw Error("duplicate label id '" + labels[i].id + "'");
    space.by_id.emplace(labels[i].id, i);
  }
  space.labels = std::move(labels);
  return space;
}

inline LabelSpace load_labels(std::istream& in, const std::string& path = "<stream>") {
  std::vector<Label> labels;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string())
      throw LoadError(path, lineno, "label record needs a string 'id'");
    auto id = rec["id"].get<std::string>();
    if (auto [it, fresh] = seen.emplace(id, lineno); !fresh)
      throw LoadError(path, lineno, "duplicate label id '" + id + "' (first on line " + std::to_string(it->second) + ")");
    auto names = detail::string_array(rec, "names", path, lineno);
    if (names.empty()) throw LoadError(path, lineno, "label '" + id + "' has zero names");
    std::string description;
    if (auto it = rec.find("description"); it != rec.end() && it->is_string()) description = it->get<std::string>();
    try {
      labels.push_back(make_label(std::move(id), std::move(names), std::move(description)));
    } catch (const LoadError&) {
      throw;
    } catch (const Error& e) {
      throw LoadError(path, lineno, e.what());
    }
  }
  if (labels.empty()) warn(path + ": empty label space");
  return make_label_space(std::move(labels));
}

inline LabelSpace load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open label file");
  return load_labels(in, path);
}

// ---------------------------------------------------------------------------
// Vocabulary

struct Vocabulary {
  struct Entry {
    std::size_t index;
    std::size_t df;
  };

  std::unordered_map<std::string, Entry> entries;
  std::vector<std::string> words;  // by index, lexicographic
  std::size_t num_docs = 0;

  std::size_t size() const noexcept { return words.size(); }

  const Entry* find(const std::string& w) const {
    auto it = entries.find(w);
    return it == entries.end() ? nullptr : &it->second;
  }
};

/// Document frequencies over each paper's full text; words seen in fewer
/// than min_df papers are dropped. Indices follow lexicographic word order.
inline Vocabulary build_vocabulary(const std::vector<Paper>& papers, std::size_t min_df) {
  if (papers.empty()) throw Error("cannot build a vocabulary over an empty corpus");
  if (min_df == 0) throw ConfigError("min_df must be positive");
  std::map<std::string, std::size_t> df;
  for (const auto& p : papers) {
    auto toks = tokenize(p.full_text());
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) ++df[std::move(t)];
  }
  Vocabulary vocab;
  vocab.num_docs = papers.size();
  for (auto& [word, count] : df) {
    if (count < min_df) continue;
    vocab.entries.emplace(word, Vocabulary::Entry{vocab.words.size(), count});
    vocab.words.push_back(word);
  }
  if (vocab.words.empty()) warn("vocabulary is empty after applying min_df=" + std::to_string(min_df));
  return vocab;
}

}  // namespace paperclf
