// Copyright 2026 The fairwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cmath>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fairwalk/alias.hpp"
#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"

namespace fairwalk {

using Walks = std::vector<std::vector<NodeId>>;

inline std::vector<std::uint64_t> build_frequency_table(const Walks& walks,
                                                        std::size_t node_count) {
  if (walks.empty()) throw Error("frequency table: empty corpus");
  std::vector<std::uint64_t> counts(node_count, 0);
  for (const auto& walk : walks) {
    for (NodeId v : walk) {
      if (v >= node_count) throw Error("frequency table: node id out of range");
      ++counts[v];
    }
  }
  return counts;
}

// Normalized count^exponent.
inline std::vector<double> negative_distribution(const std::vector<std::uint64_t>& counts,
                                                 double exponent = 0.75) {
  std::vector<double> p(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = counts[i] ? std::pow(static_cast<double>(counts[i]), exponent) : 0.0;
    total += p[i];
  }
  if (!(total > 0.0)) throw Error("negative distribution: all counts are zero");
  for (double& x : p) x /= total;
  return p;
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace detail {

// sigmoid(x) and log(sigmoid(x)) from a single exponential.
struct SigmoidTerms {
  double sigmoid;
  double log_sigmoid;
};

inline SigmoidTerms sigmoid_terms(double x) {
  const double e = std::exp(-std::abs(x));
  const double l = std::log1p(e);
  if (x >= 0.0) return {1.0 / (1.0 + e), -l};
  return {e / (1.0 + e), x - l};
}

}  // namespace detail

inline double dot(const double* a, const double* b, std::size_t n) {
  // Four partial sums so the loop vectorizes without reassociation flags.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Skip-gram negative-sampling loss for one (center, context) pair,
//   -log s(c.o) - sum_k log s(-c.n_k),
// with its gradients written into the output spans. `negatives` points at k
// rows of length dim; `grad_negatives` holds k gradient rows back to back.
inline double sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                             std::span<const double* const> negatives,
                             std::span<double> grad_center, std::span<double> grad_context,
                             std::span<double> grad_negatives) {
  const std::size_t dim = center.size();
  const double* __restrict c = center.data();
  const double* __restrict o = context.data();
  double* __restrict gc = grad_center.data();
  double* __restrict go = grad_context.data();
  const auto pos = detail::sigmoid_terms(dot(c, o, dim));
  double loss = -pos.log_sigmoid;
  const double gpos = pos.sigmoid - 1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    gc[d] = gpos * o[d];
    go[d] = gpos * c[d];
  }
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    const double* __restrict neg = negatives[j];
    double* __restrict gneg = grad_negatives.data() + j * dim;
    const double score = dot(c, neg, dim);
    const auto t = detail::sigmoid_terms(score);
    loss -= t.log_sigmoid - score;  // log s(-x) = log s(x) - x
    const double gs = t.sigmoid;
    for (std::size_t d = 0; d < dim; ++d) {
      gc[d] += gs * neg[d];
      gneg[d] = gs * c[d];
    }
  }
  return loss;
}

struct SgnsLoss {
  double loss = 0.0;
  std::vector<double> grad_center;
  std::vector<double> grad_context;
  std::vector<std::vector<double>> grad_negatives;
};

inline SgnsLoss sgns_pair_loss(const std::vector<double>& center,
                               const std::vector<double>& context,
                               const std::vector<std::vector<double>>& negatives) {
  const std::size_t dim = center.size();
  if (context.size() != dim) throw Error("sgns: vector length mismatch");
  std::vector<const double*> rows;
  for (const auto& n : negatives) {
    if (n.size() != dim) throw Error("sgns: vector length mismatch");
    rows.push_back(n.data());
  }
  SgnsLoss out;
  out.grad_center.resize(dim);
  out.grad_context.resize(dim);
  std::vector<double> gneg(rows.size() * dim);
  out.loss = sgns_pair_loss(center, context, rows, out.grad_center, out.grad_context, gneg);
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    out.grad_negatives.emplace_back(gneg.begin() + static_cast<std::ptrdiff_t>(j * dim),
                                    gneg.begin() + static_cast<std::ptrdiff_t>((j + 1) * dim));
  }
  return out;
}

struct EmbedConfig {
  std::size_t dim = 64;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr = 0.025;
  std::uint64_t seed = 0;
  // Lock-free multi-threaded updates. Not reproducible; off by default.
  bool parallel = false;
  unsigned threads = 0;
};

// Row-major n x dim matrices. The embedding proper is `input`.
struct EmbeddingMatrix {
  std::size_t dim = 0;
  std::vector<double> input;
  std::vector<double> output;
  EmbedConfig config;
  std::vector<double> epoch_loss;

  std::size_t node_count() const { return dim ? input.size() / dim : 0; }

  std::span<const double> row(NodeId v) const {
    return {input.data() + static_cast<std::size_t>(v) * dim, dim};
  }
};

namespace detail {

template <bool Shared>
inline double load_value(double& x) {
  if constexpr (Shared) {
    return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool Shared>
inline void store_value(double& x, double v) {
  if constexpr (Shared) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  } else {
    x = v;
  }
}

struct SgnsScratch {
  explicit SgnsScratch(std::size_t dim, std::size_t k)
      : center(dim), context(dim), negatives(dim * k), negative_rows(k), grad_center(dim),
        grad_context(dim), grad_negatives(dim * k), negative_ids(k) {}

  std::vector<double> center, context, negatives;
  std::vector<const double*> negative_rows;
  std::vector<double> grad_center, grad_context, grad_negatives;
  std::vector<NodeId> negative_ids;
};

struct TrainProgress {
  std::atomic<std::uint64_t> processed{0};
  std::uint64_t total = 1;
};

// Trains on walks [begin, end) for one epoch. Returns (loss sum, pair count).
template <bool Shared>
std::pair<double, std::uint64_t> sgns_epoch_shard(EmbeddingMatrix& emb, const Walks& walks,
                                                  std::size_t begin, std::size_t end,
                                                  const AliasTable& noise, Rng& rng,
                                                  TrainProgress& progress, std::size_t epoch) {
  const std::size_t dim = emb.dim;
  const std::size_t k = emb.config.negatives;
  const auto window = static_cast<std::ptrdiff_t>(emb.config.window);
  const double lr0 = emb.config.lr;
  SgnsScratch s(dim, k);
  double loss_sum = 0.0;
  std::uint64_t pairs = 0;

  auto copy_row = [dim](std::vector<double>& m, NodeId v, double* dst) {
    double* src = m.data() + static_cast<std::size_t>(v) * dim;
    for (std::size_t d = 0; d < dim; ++d) dst[d] = load_value<Shared>(src[d]);
  };
  auto apply = [dim](std::vector<double>& m, NodeId v, const double* grad, double lr) {
    double* dst = m.data() + static_cast<std::size_t>(v) * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      store_value<Shared>(dst[d], load_value<Shared>(dst[d]) - lr * grad[d]);
    }
  };

  for (std::size_t w = begin; w < end; ++w) {
    const auto& walk = walks[w];
    const auto len = static_cast<std::ptrdiff_t>(walk.size());
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const double done = static_cast<double>(
          progress.processed.fetch_add(1, std::memory_order_relaxed));
      const double lr =
          lr0 * std::max(0.01, 1.0 - 0.99 * done / static_cast<double>(progress.total));
      const NodeId center = walk[static_cast<std::size_t>(i)];
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + window);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const NodeId context = walk[static_cast<std::size_t>(j)];
        for (std::size_t n = 0; n < k; ++n) {
          NodeId neg = context;
          for (int attempt = 0; attempt < 16 && neg == context; ++attempt) {
            neg = static_cast<NodeId>(noise.sample(rng));
          }
          s.negative_ids[n] = neg;
        }
        std::span<const double> center_row, context_row;
        if constexpr (Shared) {
          // Snapshot rows other workers may be writing.
          copy_row(emb.input, center, s.center.data());
          copy_row(emb.output, context, s.context.data());
          for (std::size_t n = 0; n < k; ++n) {
            copy_row(emb.output, s.negative_ids[n], s.negatives.data() + n * dim);
            s.negative_rows[n] = s.negatives.data() + n * dim;
          }
          center_row = s.center;
          context_row = s.context;
        } else {
          center_row = {emb.input.data() + static_cast<std::size_t>(center) * dim, dim};
          context_row = {emb.output.data() + static_cast<std::size_t>(context) * dim, dim};
          for (std::size_t n = 0; n < k; ++n) {
            s.negative_rows[n] =
                emb.output.data() + static_cast<std::size_t>(s.negative_ids[n]) * dim;
          }
        }
        const double loss = sgns_pair_loss(center_row, context_row, s.negative_rows,
                                           s.grad_center, s.grad_context, s.grad_negatives);
        if (!std::isfinite(loss)) {
          throw Error("embedding diverged (non-finite loss) at epoch " +
                      std::to_string(epoch) + ", walk " + std::to_string(w) +
                      ", position " + std::to_string(i));
        }
        apply(emb.input, center, s.grad_center.data(), lr);
        apply(emb.output, context, s.grad_context.data(), lr);
        for (std::size_t n = 0; n < k; ++n) {
          apply(emb.output, s.negative_ids[n], s.grad_negatives.data() + n * dim, lr);
        }
        loss_sum += loss;
        ++pairs;
      }
    }
  }
  return {loss_sum, pairs};
}

}  // namespace detail

inline EmbeddingMatrix initial_embedding(std::size_t node_count, const EmbedConfig& cfg) {
  EmbeddingMatrix emb;
  emb.dim = cfg.dim;
  emb.config = cfg;
  emb.input.resize(node_count * cfg.dim);
  emb.output.assign(node_count * cfg.dim, 0.0);
  Rng rng(derive_seed(cfg.seed, "embed.init"));
  const double half = 0.5 / static_cast<double>(cfg.dim);
  for (double& x : emb.input) x = (rng.uniform() * 2.0 - 1.0) * half;
  return emb;
}

// SGD over every (center, context) pair within `window` positions, with k
// negatives drawn from the count^0.75 unigram distribution. The learning rate
// decays linearly from lr to lr/100 over all epochs. Sequential mode is
// bit-reproducible for a fixed seed.
inline EmbeddingMatrix train(const Walks& walks, std::size_t node_count,
                             const EmbedConfig& cfg) {
  if (cfg.dim < 2) throw Error("embed: dim must be >= 2");
  if (!(cfg.lr > 0.0)) throw Error("embed: lr must be > 0");
  auto counts = build_frequency_table(walks, node_count);
  for (std::size_t v = 0; v < node_count; ++v) {
    if (counts[v] == 0) throw Error("embed: node " + std::to_string(v) + " not in corpus");
  }
  EmbeddingMatrix emb = initial_embedding(node_count, cfg);
  if (cfg.epochs == 0) return emb;

  const AliasTable noise(negative_distribution(counts));
  std::uint64_t tokens = 0;
  for (const auto& w : walks) tokens += w.size();
  detail::TrainProgress progress;
  progress.total = std::max<std::uint64_t>(1, tokens * cfg.epochs);

  const unsigned threads = cfg.parallel ? resolve_threads(cfg.threads) : 1;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss = 0.0;
    std::uint64_t pairs = 0;
    if (threads <= 1) {
      Rng rng(derive_seed(cfg.seed, tag_hash("embed.negatives"), epoch));
      std::tie(loss, pairs) = detail::sgns_epoch_shard<false>(emb, walks, 0, walks.size(), noise,
                                                              rng, progress, epoch);
    } else {
      std::vector<std::pair<double, std::uint64_t>> shard(threads);
      parallel_for(threads, threads, [&](std::size_t t) {
        const std::size_t b = walks.size() * t / threads;
        const std::size_t e = walks.size() * (t + 1) / threads;
        Rng rng(derive_seed(cfg.seed, tag_hash("embed.negatives"), epoch * threads + t));
        shard[t] = detail::sgns_epoch_shard<true>(emb, walks, b, e, noise, rng, progress, epoch);
      });
      for (const auto& [l, p] : shard) {
        loss += l;
        pairs += p;
      }
    }
    emb.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
  }
  return emb;
}

// First line `n dim`, then `name v1 ... v_dim` per node.
inline void save_embeddings(const EmbeddingMatrix& emb, const std::vector<std::string>& names,
                            const std::string& path) {
  auto out = detail::open_output(path);
  out << emb.node_count() << ' ' << emb.dim << '\n';
  for (NodeId v = 0; v < emb.node_count(); ++v) {
    out << names[v];
    for (double x : emb.row(v)) out << ' ' << detail::format_double(x);
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

struct NamedEmbedding {
  std::vector<std::string> names;
  EmbeddingMatrix matrix;  // output vectors are not stored on disk
};

inline NamedEmbedding load_embeddings(const std::string& path) {
  auto in = detail::open_input(path);
  NamedEmbedding out;
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  auto header = detail::split_ws(line);
  if (header.size() != 2) throw ParseError(path, 1, "expected 'n dim'");
  const auto n = detail::parse_double(header[0]);
  const auto dim = detail::parse_double(header[1]);
  if (!n || !dim || *dim < 1) throw ParseError(path, 1, "bad header");
  out.matrix.dim = static_cast<std::size_t>(*dim);
  while (std::getline(in, line)) {
    ++lineno;
    auto f = detail::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != out.matrix.dim + 1) throw ParseError(path, lineno, "wrong field count");
    out.names.emplace_back(f[0]);
    for (std::size_t d = 1; d < f.size(); ++d) {
      auto x = detail::parse_double(f[d]);
      if (!x) throw ParseError(path, lineno, "bad number");
      out.matrix.input.push_back(*x);
    }
  }
  if (out.names.size() != static_cast<std::size_t>(*n)) {
    throw ParseError(path, lineno, "row count does not match header");
  }
  out.matrix.config.dim = out.matrix.dim;
  return out;
}

}  // namespace fairwalk
