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

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"

namespace fairwalk {

// Symmetric similarity graph over embedded points: the union of every
// point's k nearest neighbours, weighted by exp(-|x_i - x_j|^2 / sigma^2).
struct PropagationGraph {
  Adjacency neighbors;
  std::size_t k = 0;
  double sigma = 0.0;
};

// `points` holds n rows of length dim back to back. sigma <= 0 selects the
// mean distance to the k-th nearest neighbour. Ties in distance go to the
// lower index.
inline PropagationGraph build_propagation_graph(std::span<const double> points,
                                                std::size_t dim, std::size_t k,
                                                double sigma = 0.0) {
  if (dim == 0) throw Error("propagation graph: dim must be >= 1");
  const std::size_t n = points.size() / dim;
  if (n < 2) throw Error("propagation graph: need at least 2 points");
  if (k < 1) throw Error("propagation graph: k must be >= 1");
  k = std::min(k, n - 1);

  auto sq_dist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = points[a * dim + d] - points[b * dim + d];
      s += diff * diff;
    }
    return s;
  };

  // nearest[i] = k closest (squared distance, index) pairs, closest first.
  std::vector<std::vector<std::pair<double, NodeId>>> nearest(n);
  std::vector<std::pair<double, NodeId>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(sq_dist(i, j), static_cast<NodeId>(j));
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    nearest[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k));
  }

  if (!(sigma > 0.0)) {
    double acc = 0.0;
    for (const auto& row : nearest) acc += std::sqrt(row.back().first);
    sigma = acc / static_cast<double>(n);
    if (!(sigma > 0.0)) sigma = 1.0;  // all points coincide
  }

  std::map<std::pair<NodeId, NodeId>, double> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [d2, j] : nearest[i]) {
      const auto self = static_cast<NodeId>(i);
      edges.emplace(std::pair{std::min(self, j), std::max(self, j)},
                    std::exp(-d2 / (sigma * sigma)));
    }
  }
  PropagationGraph pg;
  pg.k = k;
  pg.sigma = sigma;
  pg.neighbors.resize(n);
  for (const auto& [key, w] : edges) {
    pg.neighbors[key.first].push_back({key.second, w});
    pg.neighbors[key.second].push_back({key.first, w});
  }
  for (auto& row : pg.neighbors) {
    std::sort(row.begin(), row.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  return pg;
}

constexpr int kUnlabeled = -1;

struct PropagationResult {
  std::size_t classes = 0;
  std::vector<double> distribution;  // n x classes, row-major
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;

  std::span<const double> row(NodeId v) const {
    return {distribution.data() + static_cast<std::size_t>(v) * classes, classes};
  }

  // Argmax per node; ties resolve to the lowest class index.
  std::vector<int> predict() const {
    const std::size_t n = classes ? distribution.size() / classes : 0;
    std::vector<int> out(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      auto r = row(static_cast<NodeId>(v));
      out[v] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return out;
  }
};

// Iterative label propagation: Y <- D^-1 W Y with labelled rows clamped to
// their one-hot vector after every sweep. Unlabelled rows start uniform, so
// nodes that no labelled node can reach stay uniform. Stops when the largest
// entry change drops below tol or after max_iters sweeps.
inline PropagationResult propagate(const PropagationGraph& pg, const std::vector<int>& seeds,
                                   std::size_t classes, std::size_t max_iters = 1000,
                                   double tol = 1e-6) {
  const std::size_t n = pg.neighbors.size();
  if (seeds.size() != n) throw Error("propagate: seed vector does not match graph");
  if (classes < 1) throw Error("propagate: need at least one class");
  PropagationResult res;
  res.classes = classes;

  std::vector<bool> seeded_class(classes, false);
  for (int s : seeds) {
    if (s == kUnlabeled) continue;
    if (s < 0 || static_cast<std::size_t>(s) >= classes) {
      throw Error("propagate: seed label out of range");
    }
    seeded_class[static_cast<std::size_t>(s)] = true;
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (!seeded_class[c]) {
      res.warnings.push_back("class " + std::to_string(c) + " has no labelled node");
    }
  }

  std::vector<double> cur(n * classes, 1.0 / static_cast<double>(classes));
  for (std::size_t v = 0; v < n; ++v) {
    if (seeds[v] == kUnlabeled) continue;
    std::fill_n(cur.begin() + static_cast<std::ptrdiff_t>(v * classes), classes, 0.0);
    cur[v * classes + static_cast<std::size_t>(seeds[v])] = 1.0;
  }
  std::vector<double> next = cur;

  for (res.iterations = 0; res.iterations < max_iters;) {
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (seeds[v] != kUnlabeled) continue;
      double wsum = 0.0;
      double* out = next.data() + v * classes;
      std::fill_n(out, classes, 0.0);
      for (const auto& nb : pg.neighbors[v]) {
        wsum += nb.weight;
        const double* in = cur.data() + static_cast<std::size_t>(nb.node) * classes;
        for (std::size_t c = 0; c < classes; ++c) out[c] += nb.weight * in[c];
      }
      const double* prev = cur.data() + v * classes;
      if (wsum > 0.0) {
        for (std::size_t c = 0; c < classes; ++c) out[c] /= wsum;
      } else {
        std::copy_n(prev, classes, out);
      }
      for (std::size_t c = 0; c < classes; ++c) {
        change = std::max(change, std::abs(out[c] - prev[c]));
      }
    }
    std::swap(cur, next);
    ++res.iterations;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  res.distribution = std::move(cur);
  return res;
}

}  // namespace fairwalk
