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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairwalk/pca.hpp"

namespace fairwalk {
namespace {

std::vector<double> covariance(const std::vector<double>& pts, std::size_t dim) {
  const std::size_t n = pts.size() / dim;
  std::vector<double> mean(dim, 0.0), cov(dim * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += pts[i * dim + d] / n;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) {
        cov[a * dim + b] += (pts[i * dim + a] - mean[a]) * (pts[i * dim + b] - mean[b]) / (n - 1);
      }
    }
  }
  return cov;
}

std::vector<double> correlated(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = nd(gen);
    for (std::size_t d = 0; d < dim; ++d) pts.push_back(z * (d + 1.0) + nd(gen) * 0.3 * (dim - d));
  }
  return pts;
}

TEST(Pca, TwoDimensionalClosedForm) {
  std::mt19937_64 gen(1);
  const auto pts = correlated(gen, 200, 2);
  const auto c = covariance(pts, 2);
  const double tr = c[0] + c[3], det = c[0] * c[3] - c[1] * c[2];
  const double disc = std::sqrt(tr * tr / 4.0 - det);
  const auto res = principal_components(pts, 2);
  EXPECT_NEAR(res.variances[0], tr / 2.0 + disc, 1e-9);
  EXPECT_NEAR(res.variances[1], tr / 2.0 - disc, 1e-9);
}

TEST(Pca, AxesAreOrthonormalEigenvectors) {
  std::mt19937_64 gen(2);
  for (std::size_t dim : {3u, 5u, 8u}) {
    const auto pts = correlated(gen, 300, dim);
    const auto c = covariance(pts, dim);
    const auto res = principal_components(pts, dim);
    ASSERT_EQ(res.axes.size(), 2u);
    EXPECT_GE(res.variances[0], res.variances[1]);
    double cross = 0.0;
    for (std::size_t d = 0; d < dim; ++d) cross += res.axes[0][d] * res.axes[1][d];
    EXPECT_NEAR(cross, 0.0, 1e-6);
    for (std::size_t k = 0; k < 2; ++k) {
      double norm = 0.0;
      for (std::size_t a = 0; a < dim; ++a) {
        double cv = 0.0;
        for (std::size_t b = 0; b < dim; ++b) cv += c[a * dim + b] * res.axes[k][b];
        EXPECT_NEAR(cv, res.variances[k] * res.axes[k][a], 1e-6 * res.variances[0]);
        norm += res.axes[k][a] * res.axes[k][a];
      }
      EXPECT_NEAR(norm, 1.0, 1e-12);
    }
  }
}

TEST(Pca, ProjectionVarianceMatchesEigenvalue) {
  std::mt19937_64 gen(3);
  const auto pts = correlated(gen, 150, 4);
  const auto res = principal_components(pts, 4);
  for (std::size_t k = 0; k < 2; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < 150; ++i) {
      s += res.projection[i * 2 + k];
      s2 += res.projection[i * 2 + k] * res.projection[i * 2 + k];
    }
    EXPECT_NEAR(s, 0.0, 1e-9);
    EXPECT_NEAR(s2 / 149.0, res.variances[k], 1e-6 * res.variances[0]);
  }
}

TEST(Pca, DeterministicSign) {
  std::mt19937_64 gen(4);
  const auto pts = correlated(gen, 50, 3);
  const auto a = principal_components(pts, 3);
  const auto b = principal_components(pts, 3);
  EXPECT_EQ(a.projection, b.projection);
  for (const auto& axis : a.axes) {
    double big = 0.0;
    for (double x : axis) {
      if (std::abs(x) > std::abs(big)) big = x;
    }
    EXPECT_GT(big, 0.0);
  }
}

TEST(Pca, DegenerateInput) {
  const std::vector<double> same{1, 2, 1, 2, 1, 2};
  const auto res = principal_components(same, 2);
  for (double x : res.projection) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(principal_components(std::vector<double>{1, 2, 3}, 2), Error);
  EXPECT_THROW(principal_components(std::vector<double>{1, 2}, 2), Error);
}

}  // namespace
}  // namespace fairwalk
