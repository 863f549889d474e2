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


#include <random>

#include <gtest/gtest.h>

#include "fairwalk/crosswalk.hpp"
#include "oracles.hpp"

namespace fairwalk {
namespace {

const std::vector<double> kAlphas{0.01, 0.25, 0.5, 0.75, 0.99};
const std::vector<double> kBetas{1, 2, 3, 5, 8, 11, 15};

struct Fixture {
  AttributedGraph graph;
  GroupPartition partition;
};

Fixture make(std::size_t n, const std::vector<Edge>& edges, const std::vector<std::string>& groups) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
  AttributedGraph g(names, edges, {"group"}, {groups});
  auto p = partition_by(g, "group");
  return {std::move(g), std::move(p)};
}

Fixture random_fixture(std::mt19937_64& gen) {
  const std::size_t n = 5 + gen() % 25;
  const std::size_t c = 2 + gen() % 3;
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < n; ++i) groups.push_back("g" + std::to_string(i < c ? i : gen() % c));
  std::uniform_real_distribution<double> w(0.1, 5.0);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (gen() % 100 < 25) edges.push_back({u, v, w(gen)});
    }
  }
  if (edges.empty()) edges.push_back({0, 1, 1.0});
  return make(n, edges, groups);
}

oracle::Matrix dense(const AttributedGraph& g) {
  oracle::Matrix m(g.node_count(), std::vector<double>(g.node_count(), 0.0));
  for (const auto& e : g.edges()) m[e.u][e.v] = m[e.v][e.u] = e.weight;
  return m;
}

std::vector<int> groups_of(const GroupPartition& p) {
  return std::vector<int>(p.group_of.begin(), p.group_of.end());
}

TEST(Closeness, SingleGroupIsZero) {
  const AttributedGraph g({"a", "b", "c"}, {{0, 1, 1}, {1, 2, 1}});
  const GroupPartition single{"group", {0, 0, 0}, {"a"}};
  const auto m = estimate_closeness(g, single, {10, 5, 3, 1});
  for (double x : m.m) EXPECT_EQ(x, 0.0);
}

TEST(Closeness, CrossEdgeIsOne) {
  auto f = make(2, {{0, 1, 1}}, {"a", "b"});
  for (std::size_t r : {1u, 7u, 50u}) {
    const auto m = estimate_closeness(f.graph, f.partition, {r, 1, 9, 1});
    EXPECT_EQ(m.m, (std::vector<double>{1.0, 1.0}));
  }
}

TEST(Closeness, StarCenterApproachesOneThird) {
  auto f = make(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}, {"x", "x", "x", "y"});
  const auto m = estimate_closeness(f.graph, f.partition, {10000, 1, 21, 1});
  EXPECT_NEAR(m.m[0], 1.0 / 3.0, 0.05);
  EXPECT_EQ(m.m[3], 1.0);
}

TEST(Closeness, IsolatedNodeIsZero) {
  auto f = make(3, {{0, 1, 1}}, {"x", "y", "y"});
  const auto m = estimate_closeness(f.graph, f.partition, {10, 5, 2, 1});
  EXPECT_EQ(m.m[2], 0.0);
}

TEST(Closeness, DeterministicAndThreadIndependent) {
  std::mt19937_64 gen(2);
  auto f = random_fixture(gen);
  const auto a = estimate_closeness(f.graph, f.partition, {10, 5, 77, 1});
  const auto b = estimate_closeness(f.graph, f.partition, {10, 5, 77, 4});
  EXPECT_EQ(a.m, b.m);
  for (double x : a.m) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(Closeness, RejectsBadConfig) {
  auto f = make(2, {{0, 1, 1}}, {"a", "b"});
  EXPECT_THROW(estimate_closeness(f.graph, f.partition, {0, 5, 1, 1}), Error);
  EXPECT_THROW(estimate_closeness(f.graph, f.partition, {5, 0, 1, 1}), Error);
}

TEST(Reweight, HandExample) {
  // v=0 with same-group neighbours 1, 2 and foreign neighbour 3.
  auto f = make(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}, {"x", "x", "x", "y"});
  BoundaryCloseness m;
  m.m = {0.5, 0.5, 0.5, 0.5};
  const auto b = reweight(f.graph, f.partition, m, {0.5, 1.0, 1e-3});
  ASSERT_EQ(b.out[0].size(), 3u);
  EXPECT_NEAR(b.out[0][0].weight, 0.25, 1e-12);
  EXPECT_NEAR(b.out[0][1].weight, 0.25, 1e-12);
  EXPECT_NEAR(b.out[0][2].weight, 0.5, 1e-12);
}

TEST(Reweight, SameGroupOnlyEqualsPlainWeights) {
  auto f = make(4, {{0, 1, 1}, {0, 2, 3}, {2, 3, 1}}, {"x", "x", "x", "y"});
  BoundaryCloseness m;
  m.m = {0.2, 0.3, 0.3, 0.9};
  for (double alpha : kAlphas) {
    const auto b = reweight(f.graph, f.partition, m, {alpha, 4.0, 1e-3});
    EXPECT_NEAR(b.out[1][0].weight, 1.0, 1e-12);
    EXPECT_NEAR(b.out[0][0].weight, 0.25, 1e-12);
    EXPECT_NEAR(b.out[0][1].weight, 0.75, 1e-12);
  }
}

TEST(Reweight, NoSameGroupNeighbourSplitsEvenly) {
  auto f = make(3, {{0, 1, 1}, {0, 2, 5}}, {"x", "y", "z"});
  BoundaryCloseness m;
  m.m = {0.0, 0.4, 0.4};
  const auto b = reweight(f.graph, f.partition, m, {0.3, 2.0, 1e-3});
  EXPECT_NEAR(b.out[0][0].weight, 0.5, 1e-12);
  EXPECT_NEAR(b.out[0][1].weight, 0.5, 1e-12);
}

TEST(Reweight, MatchesOracleAcrossGrid) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_fixture(gen);
    const auto w = dense(f.graph);
    const auto groups = groups_of(f.partition);
    BoundaryCloseness m;
    for (std::size_t i = 0; i < f.graph.node_count(); ++i) m.m.push_back(unit(gen));
    for (double alpha : kAlphas) {
      for (double beta : kBetas) {
        const auto b = reweight(f.graph, f.partition, m, {alpha, beta, 1e-3});
        for (NodeId v = 0; v < f.graph.node_count(); ++v) {
          if (b.out[v].empty()) continue;
          const auto expect = oracle::crosswalk_row(w, groups, m.m, static_cast<int>(v), alpha,
                                                    beta, 1e-3);
          double total = 0.0, cross = 0.0;
          bool has_same = false, has_cross = false;
          for (const auto& nb : b.out[v]) {
            EXPECT_NEAR(nb.weight, expect[nb.node], 1e-9);
            total += nb.weight;
            if (groups[nb.node] != groups[v]) {
              cross += nb.weight;
              has_cross = true;
            } else {
              has_same = true;
            }
          }
          ASSERT_NEAR(total, 1.0, 1e-9);
          if (has_same && has_cross) {
            ASSERT_NEAR(cross, alpha, 1e-9);
          }
        }
      }
    }
  }
}

TEST(Reweight, MonotoneInBeta) {
  // Node 0 with same-group neighbours 1 (m=0.6) and 2 (m=0.2), plus a foreign one.
  auto f = make(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}, {"x", "x", "x", "y"});
  BoundaryCloseness m;
  m.m = {0.1, 0.6, 0.2, 0.5};
  double last = 0.0;
  for (double beta = 0.0; beta <= 20.0; beta += 0.5) {
    const auto b = reweight(f.graph, f.partition, m, {0.5, beta, 1e-3});
    EXPECT_GE(b.out[0][0].weight, last);
    last = b.out[0][0].weight;
  }
}

TEST(Reweight, ScalingClosenessIsInvariantWithoutEpsilon) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unit(0.05, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_fixture(gen);
    BoundaryCloseness m, m2;
    for (std::size_t i = 0; i < f.graph.node_count(); ++i) {
      m.m.push_back(unit(gen));
      m2.m.push_back(2.0 * m.m.back());
    }
    const auto a = reweight(f.graph, f.partition, m, {0.4, 3.0, 0.0});
    const auto b = reweight(f.graph, f.partition, m2, {0.4, 3.0, 0.0});
    for (NodeId v = 0; v < f.graph.node_count(); ++v) {
      for (std::size_t i = 0; i < a.out[v].size(); ++i) {
        EXPECT_NEAR(a.out[v][i].weight, b.out[v][i].weight, 1e-12);
      }
    }
  }
}

TEST(Reweight, ZeroClosenessWithoutEpsilonFallsBackToWeights) {
  const AttributedGraph g({"a", "b", "c"}, {{0, 1, 1}, {0, 2, 3}});
  const GroupPartition p{"group", {0, 0, 0}, {"x", "y"}};
  BoundaryCloseness m;
  m.m = {0.0, 0.0, 0.0};
  const auto b = reweight(g, p, m, {0.5, 2.0, 0.0});
  EXPECT_NEAR(b.out[0][0].weight, 0.25, 1e-12);
  EXPECT_NEAR(b.out[0][1].weight, 0.75, 1e-12);
}

TEST(Reweight, RejectsBadParameters) {
  auto f = make(2, {{0, 1, 1}}, {"a", "b"});
  BoundaryCloseness m;
  m.m = {0.0, 0.0};
  EXPECT_THROW(reweight(f.graph, f.partition, m, {0.0, 1.0, 1e-3}), Error);
  EXPECT_THROW(reweight(f.graph, f.partition, m, {1.0, 1.0, 1e-3}), Error);
  EXPECT_THROW(reweight(f.graph, f.partition, m, {0.5, -1.0, 1e-3}), Error);
  m.m = {0.0};
  EXPECT_THROW(reweight(f.graph, f.partition, m, {0.5, 1.0, 1e-3}), Error);
}

}  // namespace
}  // namespace fairwalk
