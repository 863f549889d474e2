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


// Reference implementations used as test oracles. They work on dense
// matrices and plain formulas and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// node2vec next-step distribution from a dense weight matrix.
inline std::vector<double> transition(const Matrix& w, int prev, int cur, double p, double q) {
  const std::size_t n = w.size();
  std::vector<double> score(n, 0.0);
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (w[cur][x] == 0.0) continue;
    double f = 1.0;
    if (prev >= 0) {
      if (static_cast<int>(x) == prev) {
        f = 1.0 / p;
      } else if (w[prev][x] == 0.0) {
        f = 1.0 / q;
      }
    }
    score[x] = w[cur][x] * f;
    total += score[x];
  }
  for (double& s : score) s /= total;
  return score;
}

// CrossWalk out-distribution of node v, dense and by the defining formula.
inline std::vector<double> crosswalk_row(const Matrix& w, const std::vector<int>& group,
                                         const std::vector<double>& m, int v, double alpha,
                                         double beta, double eps) {
  const std::size_t n = w.size();
  std::map<int, double> share_total;
  for (std::size_t u = 0; u < n; ++u) {
    if (w[v][u] > 0.0) share_total[group[u]] += w[v][u] * std::pow(m[u] + eps, beta);
  }
  std::vector<double> out(n, 0.0);
  const bool has_same = share_total.count(group[v]) > 0;
  const double foreign = static_cast<double>(share_total.size() - (has_same ? 1 : 0));
  for (std::size_t u = 0; u < n; ++u) {
    if (w[v][u] <= 0.0) continue;
    const double within = w[v][u] * std::pow(m[u] + eps, beta) / share_total[group[u]];
    double mass;
    if (!has_same) {
      mass = 1.0 / foreign;
    } else if (foreign == 0.0) {
      mass = 1.0;
    } else {
      mass = group[u] == group[v] ? 1.0 - alpha : alpha / foreign;
    }
    out[u] = mass * within;
  }
  return out;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// Mean and variance of a sum of independent Bernoulli edges in a planted
// partition graph.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments sbm_edge_moments(const std::vector<std::size_t>& blocks, double p_in,
                                double p_out) {
  Moments m;
  auto add = [&](double pairs, double p) {
    m.mean += pairs * p;
    m.variance += pairs * p * (1.0 - p);
  };
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const double na = static_cast<double>(blocks[a]);
    add(na * (na - 1.0) / 2.0, p_in);
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      add(na * static_cast<double>(blocks[b]), p_out);
    }
  }
  return m;
}

// SGNS objective written out term by term.
inline double sgns_loss(const std::vector<double>& c, const std::vector<double>& o,
                        const std::vector<std::vector<double>>& negs) {
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(s);
  };
  double loss = std::log1p(std::exp(-dot(c, o)));
  for (const auto& n : negs) loss += std::log1p(std::exp(dot(c, n)));
  return loss;
}

// F1 of class `positive` from precision and recall.
inline double f1(const std::vector<int>& pred, const std::vector<int>& truth, int positive) {
  double tp = 0, pp = 0, ap = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    tp += pred[i] == positive && truth[i] == positive;
    pp += pred[i] == positive;
    ap += truth[i] == positive;
  }
  if (tp == 0.0) return 0.0;
  const double precision = tp / pp;
  const double recall = tp / ap;
  return 2.0 * precision * recall / (precision + recall);
}

// Score vectors of integer thousandths, so mean and variance are exact
// rationals: var = (C * sum(k^2) - sum(k)^2) / (C^2 * 10^6).
struct ExactScores {
  std::vector<std::int64_t> thousandths;

  std::vector<double> values() const {
    std::vector<double> v;
    for (auto k : thousandths) v.push_back(static_cast<double>(k) / 1000.0);
    return v;
  }
  double max() const {
    return static_cast<double>(*std::max_element(thousandths.begin(), thousandths.end())) /
           1000.0;
  }
  double mean() const {
    const auto s = std::accumulate(thousandths.begin(), thousandths.end(), std::int64_t{0});
    return static_cast<double>(s) / (1000.0 * static_cast<double>(thousandths.size()));
  }
  double variance() const {
    const auto c = static_cast<std::int64_t>(thousandths.size());
    std::int64_t s = 0, s2 = 0;
    for (auto k : thousandths) {
      s += k;
      s2 += k * k;
    }
    return static_cast<double>(c * s2 - s * s) / static_cast<double>(c * c * 1000000);
  }
};

// Harmonic solution of a labelled path: interior node i of a path with ends
// labelled 0 and 1 has P(class 1) = i / (len - 1).
inline double path_harmonic(std::size_t i, std::size_t len) {
  return static_cast<double>(i) / static_cast<double>(len - 1);
}

// All-pairs kNN union with RBF weights.
inline std::map<std::pair<int, int>, double> knn_union(const Matrix& pts, std::size_t k,
                                                       double sigma) {
  const std::size_t n = pts.size();
  auto d2 = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts[a].size(); ++i) s += std::pow(pts[a][i] - pts[b][i], 2);
    return s;
  };
  std::map<std::pair<int, int>, double> edges;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back({d2(i, j), j});
    }
    std::sort(order.begin(), order.end());
    for (std::size_t r = 0; r < k && r < order.size(); ++r) {
      const auto j = order[r].second;
      const int a = static_cast<int>(std::min(i, j));
      const int b = static_cast<int>(std::max(i, j));
      edges[{a, b}] = std::exp(-d2(a, b) / (sigma * sigma));
    }
  }
  return edges;
}

}  // namespace oracle
