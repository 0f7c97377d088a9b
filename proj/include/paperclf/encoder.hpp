// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "citegraph.hpp"
#include "common.hpp"
#include "corpus.hpp"
#include "parallel.hpp"
#include "text.hpp"

namespace paperclf {

using Embedding = std::vector<double>;

/// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const noexcept { return index.size(); }
  bool empty() const noexcept { return index.empty(); }

  double norm() const {
    double s = 0.0;
    for (double v : value) s += v * v;
    return std::sqrt(s);
  }

  std::vector<double> to_dense(std::size_t dim) const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i < index.size(); ++i) out[index[i]] = value[i];
    return out;
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// Cosine similarity; 0 when either operand is the zero vector.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = l2_norm(a), nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

/// Signed feature hashing over unigrams and bigrams with term-frequency
/// weights, L2-normalized.
struct HashFeaturizer {
  std::size_t dim = 2048;
  std::uint64_t seed = 0x6a09e667f3bcc908ULL;
  std::size_t max_tokens = 256;

  struct Bucket {
    std::uint32_t index;
    double sign;
  };

  Bucket bucket(std::string_view key) const {
    const std::uint64_t h = hash_bytes(key, seed);
    return {static_cast<std::uint32_t>(h % dim), (h >> 63) ? -1.0 : 1.0};
  }

  SparseVector featurize(std::string_view text) const {
    auto tokens = tokenize(text);
    if (tokens.size() > max_tokens) tokens.resize(max_tokens);
    std::map<std::uint32_t, double> acc;
    std::string key;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto b = bucket(tokens[i]);
      acc[b.index] += b.sign;
      if (i + 1 < tokens.size()) {
        key.assign(tokens[i]).push_back('\x01');
        key += tokens[i + 1];
        b = bucket(key);
        acc[b.index] += b.sign;
      }
    }
    SparseVector v;
    double sq = 0.0;
    for (const auto& [idx, val] : acc) {
      if (val == 0.0) continue;
      v.index.push_back(idx);
      v.value.push_back(val);
      sq += val * val;
    }
    if (sq > 0.0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& x : v.value) x *= inv;
    }
    return v;
  }
};

/// Optimizer and schedule settings for contrastive training.
struct TrainingConfig {
  double learning_rate = 1e-2;
  std::size_t warmup_steps = 100;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 8;
  std::size_t epochs = 1;
  std::size_t total_steps = 0;  // 0: epochs * ceil(tuples / batch_size)
  std::uint64_t seed = 1;
};

/// Hashed base features -> projection (H x E, row-major) -> pair scoring head
/// over psi(u, v) = [u * v ; |u - v|] (length 2E).
struct ScorerModel {
  HashFeaturizer featurizer;
  std::size_t embed_dim = 256;
  std::vector<double> projection;
  std::vector<double> head;
  TrainingConfig training;

  std::size_t feature_dim() const noexcept { return featurizer.dim; }

  /// Projection entries uniform in [-1/sqrt(H), 1/sqrt(H)], head zero.
  static ScorerModel initialize(std::size_t feature_dim, std::size_t embed_dim, std::uint64_t hash_seed,
                                std::uint64_t init_seed, TrainingConfig training = {}) {
    if (feature_dim == 0 || embed_dim == 0) throw ConfigError("feature and embedding dimensions must be positive");
    ScorerModel m;
    m.featurizer.dim = feature_dim;
    m.featurizer.seed = hash_seed;
    m.embed_dim = embed_dim;
    m.training = training;
    m.projection.resize(feature_dim * embed_dim);
    m.head.assign(2 * embed_dim, 0.0);
    Rng rng(init_seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));
    for (double& x : m.projection) x = uniform_real(rng, -scale, scale);
    return m;
  }

  const double* projection_row(std::size_t h) const { return projection.data() + h * embed_dim; }
};

/// W_proj^T f, before normalization.
inline std::vector<double> project(const ScorerModel& m, const SparseVector& f) {
  std::vector<double> z(m.embed_dim, 0.0);
  for (std::size_t i = 0; i < f.nnz(); ++i) {
    const double fv = f.value[i];
    const double* row = m.projection_row(f.index[i]);
    for (std::size_t e = 0; e < m.embed_dim; ++e) z[e] += fv * row[e];
  }
  return z;
}

inline Embedding normalized(std::vector<double> z) {
  const double n = l2_norm(z);
  if (n == 0.0) return z;
  for (double& x : z) x /= n;
  return z;
}

inline Embedding embed_features(const ScorerModel& m, const SparseVector& f) { return normalized(project(m, f)); }

/// Bi-Encoder embedding: normalize(W_proj^T featurize(text)).
inline Embedding bi_embed(const ScorerModel& m, std::string_view text) {
  return embed_features(m, m.featurizer.featurize(text));
}

inline std::vector<double> pair_features(const Embedding& u, const Embedding& v) {
  const std::size_t e = u.size();
  std::vector<double> psi(2 * e);
  for (std::size_t k = 0; k < e; ++k) {
    psi[k] = u[k] * v[k];
    psi[e + k] = std::abs(u[k] - v[k]);
  }
  return psi;
}

/// Head applied to psi(u, v) of two precomputed embeddings.
inline double pair_score(const ScorerModel& m, const Embedding& u, const Embedding& v) {
  const std::size_t e = m.embed_dim;
  double s = 0.0;
  for (std::size_t k = 0; k < e; ++k) s += m.head[k] * (u[k] * v[k]) + m.head[e + k] * std::abs(u[k] - v[k]);
  return s;
}

/// Cross-Encoder surrogate: w . psi(bi_embed(s), bi_embed(t)).
inline double cross_score(const ScorerModel& m, std::string_view s, std::string_view t) {
  return pair_score(m, bi_embed(m, s), bi_embed(m, t));
}

/// -log(e^pos / (e^pos + e^neg)) = softplus(neg - pos), evaluated without overflow.
inline double contrastive_loss(double s_pos, double s_neg) {
  const double d = s_neg - s_pos;
  return d > 0.0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Gradient over (W_proj, w). Only projection rows touched by the inputs'
/// features are stored.
struct Gradient {
  std::map<std::uint32_t, std::vector<double>> projection_rows;
  std::vector<double> head;

  double projection_at(std::size_t h, std::size_t e) const {
    auto it = projection_rows.find(static_cast<std::uint32_t>(h));
    return it == projection_rows.end() ? 0.0 : it->second[e];
  }

  void add(const Gradient& other, double scale = 1.0) {
    if (head.empty()) head.assign(other.head.size(), 0.0);
    for (std::size_t k = 0; k < other.head.size(); ++k) head[k] += scale * other.head[k];
    for (const auto& [row, vals] : other.projection_rows) {
      auto& dst = projection_rows[row];
      if (dst.empty()) dst.assign(vals.size(), 0.0);
      for (std::size_t e = 0; e < vals.size(); ++e) dst[e] += scale * vals[e];
    }
  }
};

struct LossAndGradient {
  double loss = 0.0;
  double s_pos = 0.0;
  double s_neg = 0.0;
  Gradient grad;
};

namespace detail {

struct EncodedText {
  SparseVector features;
  std::vector<double> z;
  double z_norm = 0.0;
  Embedding u;
};

inline EncodedText encode(const ScorerModel& m, const SparseVector& f) {
  EncodedText t;
  t.features = f;
  t.z = project(m, f);
  t.z_norm = l2_norm(t.z);
  t.u = t.z;
  if (t.z_norm > 0.0)
    for (double& x : t.u) x /= t.z_norm;
  return t;
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Pulls dL/du back through u = z / |z| and z = W^T f into W's rows.
inline void backprop_text(const EncodedText& t, const std::vector<double>& grad_u, Gradient& g) {
  if (t.z_norm == 0.0 || t.features.empty()) return;
  const double proj = dot(t.u, grad_u);
  std::vector<double> grad_z(grad_u.size());
  for (std::size_t k = 0; k < grad_u.size(); ++k) grad_z[k] = (grad_u[k] - t.u[k] * proj) / t.z_norm;
  for (std::size_t i = 0; i < t.features.nnz(); ++i) {
    auto& row = g.projection_rows[t.features.index[i]];
    if (row.empty()) row.assign(grad_z.size(), 0.0);
    const double fv = t.features.value[i];
    for (std::size_t k = 0; k < grad_z.size(); ++k) row[k] += fv * grad_z[k];
  }
}

}  // namespace detail

/// Loss and exact gradient for one tuple given its featurized texts.
inline LossAndGradient loss_gradient(const ScorerModel& m, const SparseVector& anchor, const SparseVector& positive,
                                     const SparseVector& negative) {
  const std::size_t E = m.embed_dim;
  const auto a = detail::encode(m, anchor);
  const auto p = detail::encode(m, positive);
  const auto n = detail::encode(m, negative);

  LossAndGradient out;
  out.s_pos = pair_score(m, a.u, p.u);
  out.s_neg = pair_score(m, a.u, n.u);
  out.loss = contrastive_loss(out.s_pos, out.s_neg);
  // dL/ds_pos = -sigma, dL/ds_neg = +sigma with sigma = sigmoid(s_neg - s_pos).
  const double sg = sigmoid(out.s_neg - out.s_pos);

  auto& gw = out.grad.head;
  gw.assign(2 * E, 0.0);
  std::vector<double> ga(E, 0.0), gp(E, 0.0), gn(E, 0.0);
  for (std::size_t k = 0; k < E; ++k) {
    const double dp = a.u[k] - p.u[k];
    const double dn = a.u[k] - n.u[k];
    const double sp = detail::sign(dp), sn = detail::sign(dn);
    const double w1 = m.head[k], w2 = m.head[E + k];
    gw[k] = sg * (a.u[k] * n.u[k] - a.u[k] * p.u[k]);
    gw[E + k] = sg * (std::abs(dn) - std::abs(dp));
    ga[k] = sg * ((w1 * n.u[k] + w2 * sn) - (w1 * p.u[k] + w2 * sp));
    gp[k] = -sg * (w1 * a.u[k] - w2 * sp);
    gn[k] = sg * (w1 * a.u[k] - w2 * sn);
  }
  detail::backprop_text(a, ga, out.grad);
  detail::backprop_text(p, gp, out.grad);
  detail::backprop_text(n, gn, out.grad);
  return out;
}

inline LossAndGradient loss_gradient(const ScorerModel& m, std::string_view anchor, std::string_view positive,
                                     std::string_view negative) {
  return loss_gradient(m, m.featurizer.featurize(anchor), m.featurizer.featurize(positive),
                       m.featurizer.featurize(negative));
}

class TrainingError : public Error {
 public:
  TrainingError(std::size_t step, const std::string& what)
      : Error("training diverged at step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean batch loss per step
  std::size_t steps = 0;
};

/// Learning-rate multiplier: linear warmup over warmup_steps, then linear decay to 0.
inline double schedule_multiplier(std::size_t step, std::size_t warmup, std::size_t total) {
  if (step < warmup) return static_cast<double>(step + 1) / static_cast<double>(warmup);
  if (total <= warmup) return 1.0;
  return std::max(0.0, static_cast<double>(total - step) / static_cast<double>(total - warmup));
}

inline const std::string& paragraph_text(const Corpus& corpus, const ParagraphRef& r) {
  return corpus.papers.at(r.paper).leaves().at(r.leaf)->text;
}

/// Seeded mini-batch AdamW with decoupled weight decay. Per-tuple gradients
/// may be computed on several threads; they are always summed in tuple order.
inline TrainResult train(ScorerModel& model, const std::vector<ContrastiveTuple>& tuples, const Corpus& corpus,
                         unsigned threads = 1) {
  if (tuples.empty()) throw Error("train: no tuples");
  const TrainingConfig& cfg = model.training;
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");

  const std::size_t batch_size = std::min(cfg.batch_size, tuples.size());
  const std::size_t per_epoch = (tuples.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total = cfg.total_steps ? cfg.total_steps : per_epoch * std::max<std::size_t>(cfg.epochs, 1);

  // Featurize each referenced paragraph once.
  std::map<std::pair<std::size_t, std::size_t>, SparseVector> cache;
  auto features = [&](const ParagraphRef& r) -> const SparseVector& {
    auto key = std::make_pair(r.paper, r.leaf);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, model.featurizer.featurize(paragraph_text(corpus, r))).first;
    return it->second;
  };
  for (const auto& t : tuples) {
    features(t.anchor);
    features(t.positive);
    features(t.negative);
  }

  std::vector<double> m1(model.projection.size(), 0.0), v1(model.projection.size(), 0.0);
  std::vector<double> m2(model.head.size(), 0.0), v2(model.head.size(), 0.0);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(tuples.size());
  std::size_t cursor = order.size();

  TrainResult result;
  result.loss_trace.reserve(total);
  for (std::size_t step = 0; step < total; ++step) {
    std::vector<std::size_t> batch;
    while (batch.size() < batch_size) {
      if (cursor == order.size()) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(order, rng);
        cursor = 0;
      }
      batch.push_back(order[cursor++]);
    }

    std::vector<LossAndGradient> parts(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t i) {
      const auto& t = tuples[batch[i]];
      parts[i] = loss_gradient(model, cache.at({t.anchor.paper, t.anchor.leaf}),
                               cache.at({t.positive.paper, t.positive.leaf}),
                               cache.at({t.negative.paper, t.negative.leaf}));
    });
    Gradient g;
    g.head.assign(model.head.size(), 0.0);
    double loss = 0.0;
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (const auto& part : parts) {
      loss += part.loss;
      g.add(part.grad, inv);
    }
    loss *= inv;
    if (!std::isfinite(loss)) throw TrainingError(step, "non-finite loss");
    result.loss_trace.push_back(loss);

    const double lr = cfg.learning_rate * schedule_multiplier(step, cfg.warmup_steps, total);
    const double t = static_cast<double>(step + 1);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    const double decay = 1.0 - lr * cfg.weight_decay;

    auto update = [&](double& theta, double& m, double& v, double grad) {
      theta *= decay;
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
      theta -= lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.epsilon);
    };

    for (std::size_t k = 0; k < model.head.size(); ++k) update(model.head[k], m2[k], v2[k], g.head[k]);
    const std::size_t E = model.embed_dim;
    auto row_it = g.projection_rows.begin();
    for (std::size_t h = 0; h < model.feature_dim(); ++h) {
      const std::vector<double>* grow = nullptr;
      if (row_it != g.projection_rows.end() && row_it->first == h) grow = &(row_it++)->second;
      for (std::size_t e = 0; e < E; ++e) {
        const std::size_t idx = h * E + e;
        update(model.projection[idx], m1[idx], v1[idx], grow ? (*grow)[e] : 0.0);
      }
    }

    for (double x : model.head)
      if (!std::isfinite(x)) throw TrainingError(step, "non-finite scoring-head parameter");
    for (const auto& [h, row] : g.projection_rows)
      for (std::size_t e = 0; e < E; ++e)
        if (!std::isfinite(model.projection[h * E + e])) throw TrainingError(step, "non-finite projection parameter");
  }
  result.steps = total;
  return result;
}

/// Fraction of tuples with score(p, p+) > score(p, p-).
inline double ordering_accuracy(const ScorerModel& m, const std::vector<ContrastiveTuple>& tuples, const Corpus& corpus) {
  if (tuples.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& t : tuples) {
    const auto a = bi_embed(m, paragraph_text(corpus, t.anchor));
    const double sp = pair_score(m, a, bi_embed(m, paragraph_text(corpus, t.positive)));
    const double sn = pair_score(m, a, bi_embed(m, paragraph_text(corpus, t.negative)));
    if (sp > sn) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(tuples.size());
}

// ---------------------------------------------------------------------------
// Checkpoint: 8-byte magic, u32 header length, JSON header, then the
// projection and head as little-endian IEEE doubles.

inline constexpr char kScorerMagic[8] = {'P', 'C', 'L', 'F', 'S', 'C', 'R', '1'};
inline constexpr int kScorerVersion = 1;

inline void save_scorer(std::ostream& out, const ScorerModel& m) {
  static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
  nlohmann::json h;
  h["version"] = kScorerVersion;
  h["feature_dim"] = m.featurizer.dim;
  h["embed_dim"] = m.embed_dim;
  h["hash_seed"] = m.featurizer.seed;
  h["max_tokens"] = m.featurizer.max_tokens;
  const auto& c = m.training;
  h["training"] = {{"learning_rate", c.learning_rate}, {"warmup_steps", c.warmup_steps},
                   {"weight_decay", c.weight_decay},   {"beta1", c.beta1},
                   {"beta2", c.beta2},                 {"epsilon", c.epsilon},
                   {"batch_size", c.batch_size},       {"epochs", c.epochs},
                   {"total_steps", c.total_steps},     {"seed", c.seed}};
  const std::string header = h.dump();
  const auto len = static_cast<std::uint32_t>(header.size());
  out.write(kScorerMagic, sizeof kScorerMagic);
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(m.projection.data()),
            static_cast<std::streamsize>(m.projection.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(m.head.data()), static_cast<std::streamsize>(m.head.size() * sizeof(double)));
  if (!out) throw Error("failed to write scorer checkpoint");
}

inline ScorerModel load_scorer(std::istream& in, const std::string& path = "<stream>") {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kScorerMagic, sizeof magic) != 0)
    throw LoadError(path, 0, "not a scorer checkpoint");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  std::string header(len, '\0');
  in.read(header.data(), len);
  if (!in) throw LoadError(path, 0, "truncated checkpoint header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path, 0, std::string("bad checkpoint header: ") + e.what());
  }
  if (h.value("version", 0) != kScorerVersion) throw LoadError(path, 0, "unsupported checkpoint version");
  ScorerModel m;
  m.featurizer.dim = h.at("feature_dim").get<std::size_t>();
  m.featurizer.seed = h.at("hash_seed").get<std::uint64_t>();
  m.featurizer.max_tokens = h.at("max_tokens").get<std::size_t>();
  m.embed_dim = h.at("embed_dim").get<std::size_t>();
  const auto& t = h.at("training");
  m.training.learning_rate = t.at("learning_rate");
  m.training.warmup_steps = t.at("warmup_steps");
  m.training.weight_decay = t.at("weight_decay");
  m.training.beta1 = t.at("beta1");
  m.training.beta2 = t.at("beta2");
  m.training.epsilon = t.at("epsilon");
  m.training.batch_size = t.at("batch_size");
  m.training.epochs = t.at("epochs");
  m.training.total_steps = t.at("total_steps");
  m.training.seed = t.at("seed");
  m.projection.resize(m.featurizer.dim * m.embed_dim);
  m.head.resize(2 * m.embed_dim);
  in.read(reinterpret_cast<char*>(m.projection.data()), static_cast<std::streamsize>(m.projection.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(m.head.data()), static_cast<std::streamsize>(m.head.size() * sizeof(double)));
  if (!in) throw LoadError(path, 0, "truncated checkpoint body");
  return m;
}

inline void save_scorer(const std::string& path, const ScorerModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  save_scorer(out, m);
}

inline ScorerModel load_scorer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, 0, "cannot open scorer checkpoint");
  return load_scorer(in, path);
}

// ---------------------------------------------------------------------------
// External embeddings, keyed by label id or "<paper_id>#<leaf_idx>". Either
// TSV lines "id<TAB>v1 v2 ... vE" or JSON Lines {"id": ..., "vector": [...]}.

using EmbeddingTable = std::unordered_map<std::string, Embedding>;

inline std::string paragraph_key(const std::string& paper_id, std::size_t leaf) {
  return paper_id + "#" + std::to_string(leaf);
}

inline EmbeddingTable load_embeddings(std::istream& in, std::size_t dim, const std::string& path = "<stream>") {
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    Embedding v;
    if (line.front() == '{') {
      try {
        auto j = nlohmann::json::parse(line);
        id = j.at("id").get<std::string>();
        v = j.at("vector").get<std::vector<double>>();
      } catch (const nlohmann::json::exception& e) {
        throw LoadError(path, lineno, std::string("bad embedding record: ") + e.what());
      }
    } else {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw LoadError(path, lineno, "expected id<TAB>values");
      id = line.substr(0, tab);
      std::istringstream vals(line.substr(tab + 1));
      double x;
      while (vals >> x) v.push_back(x);
      if (!vals.eof()) throw LoadError(path, lineno, "non-numeric embedding value");
    }
    if (v.size() != dim)
      throw LoadError(path, lineno, "embedding for '" + id + "' has dimension " + std::to_string(v.size()) +
                                        ", expected " + std::to_string(dim));
    for (double x : v)
      if (!std::isfinite(x)) throw LoadError(path, lineno, "non-finite embedding value");
    table[id] = normalized(std::move(v));
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open embedding file");
  return load_embeddings(in, dim, path);
}

}  // namespace paperclf
