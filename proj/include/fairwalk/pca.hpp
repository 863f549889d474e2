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

#include <cmath>
#include <span>
#include <vector>

#include "fairwalk/common.hpp"

namespace fairwalk {

struct PcaResult {
  std::size_t components = 0;
  std::vector<std::vector<double>> axes;  // unit eigenvectors of the covariance
  std::vector<double> variances;          // matching eigenvalues
  std::vector<double> projection;         // n x components, row-major
};

// Leading principal components by power iteration with deflation on the
// sample covariance. Each axis is signed so its largest-magnitude entry is
// positive, which makes the output deterministic.
inline PcaResult principal_components(std::span<const double> points, std::size_t dim,
                                      std::size_t components = 2,
                                      std::size_t max_iters = 1000, double tol = 1e-12) {
  if (dim == 0 || points.size() % dim != 0) throw Error("pca: bad shape");
  const std::size_t n = points.size() / dim;
  if (n < 2) throw Error("pca: need at least 2 points");
  components = std::min(components, dim);

  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += points[i * dim + d];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> cov(dim * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < dim; ++a) {
      const double xa = points[i * dim + a] - mean[a];
      for (std::size_t b = a; b < dim; ++b) {
        cov[a * dim + b] += xa * (points[i * dim + b] - mean[b]);
      }
    }
  }
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      cov[a * dim + b] /= static_cast<double>(n - 1);
      cov[b * dim + a] = cov[a * dim + b];
    }
  }

  PcaResult res;
  res.components = components;
  Rng rng(derive_seed(0, "pca.start"));
  std::vector<double> v(dim), w(dim);
  for (std::size_t c = 0; c < components; ++c) {
    for (double& x : v) x = rng.uniform() - 0.5;
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
      for (std::size_t a = 0; a < dim; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < dim; ++b) s += cov[a * dim + b] * v[b];
        w[a] = s;
      }
      double norm = 0.0;
      for (double x : w) norm += x * x;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;  // remaining variance is zero
      double delta = 0.0;
      for (std::size_t a = 0; a < dim; ++a) {
        w[a] /= norm;
        delta = std::max(delta, std::abs(w[a] - v[a]));
      }
      lambda = norm;
      v.swap(w);
      if (delta < tol) break;
    }
    std::size_t big = 0;
    for (std::size_t a = 1; a < dim; ++a) {
      if (std::abs(v[a]) > std::abs(v[big])) big = a;
    }
    if (v[big] < 0.0) {
      for (double& x : v) x = -x;
    }
    // Deflate.
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) cov[a * dim + b] -= lambda * v[a] * v[b];
    }
    res.axes.push_back(v);
    res.variances.push_back(lambda);
  }

  res.projection.assign(n * components, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < components; ++c) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) s += (points[i * dim + d] - mean[d]) * res.axes[c][d];
      res.projection[i * components + c] = s;
    }
  }
  return res;
}

}  // namespace fairwalk
