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
#include <string>
#include <vector>

#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"

namespace fairwalk {

struct ClosenessConfig {
  std::size_t walks_per_node = 10;  // r
  std::size_t walk_length = 5;      // d
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// m(v): share of positions visited by short first-order walks from v that lie
// in a group other than v's.
struct BoundaryCloseness {
  std::vector<double> m;
  std::size_t walks_per_node = 0;
  std::size_t walk_length = 0;
  std::uint64_t seed = 0;
};

// CrossWalk transition weights. out[v] lists every original neighbour of v
// (same order as the graph adjacency) with its transition probability.
struct BiasedGraph {
  Adjacency out;
  double alpha = 0.5;
  double beta = 0.0;
  double epsilon = 1e-3;
};

namespace detail {

// Cumulative weights per node for first-order sampling.
inline std::vector<std::vector<double>> cumulative_weights(const AttributedGraph& g) {
  std::vector<std::vector<double>> cum(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(v)) {
      acc += nb.weight;
      cum[v].push_back(acc);
    }
  }
  return cum;
}

inline NodeId first_order_step(const AttributedGraph& g,
                               const std::vector<std::vector<double>>& cum, NodeId v,
                               Rng& rng) {
  const auto& c = cum[v];
  const double target = rng.uniform() * c.back();
  auto it = std::upper_bound(c.begin(), c.end(), target);
  if (it == c.end()) --it;
  return g.neighbors(v)[static_cast<std::size_t>(it - c.begin())].node;
}

}  // namespace detail

inline BoundaryCloseness estimate_closeness(const AttributedGraph& graph,
                                            const GroupPartition& partition,
                                            const ClosenessConfig& cfg) {
  if (cfg.walks_per_node < 1 || cfg.walk_length < 1) {
    throw Error("closeness: walks_per_node and walk_length must be >= 1");
  }
  if (graph.edge_count() == 0) throw Error("closeness: graph has no edges");
  if (partition.node_count() != graph.node_count()) {
    throw Error("closeness: partition does not match graph");
  }
  const auto cum = detail::cumulative_weights(graph);
  BoundaryCloseness out;
  out.walks_per_node = cfg.walks_per_node;
  out.walk_length = cfg.walk_length;
  out.seed = cfg.seed;
  out.m.assign(graph.node_count(), 0.0);
  const double visits = static_cast<double>(cfg.walks_per_node * cfg.walk_length);

  parallel_for(graph.node_count(), cfg.threads, [&](std::size_t i) {
    const auto v = static_cast<NodeId>(i);
    if (graph.degree(v) == 0) return;
    Rng rng(derive_seed(cfg.seed, v));
    const auto home = partition.group_of[v];
    std::size_t foreign = 0;
    for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
      NodeId cur = v;
      for (std::size_t step = 0; step < cfg.walk_length; ++step) {
        cur = detail::first_order_step(graph, cum, cur, rng);
        if (partition.group_of[cur] != home) ++foreign;
      }
    }
    out.m[v] = static_cast<double>(foreign) / visits;
  });
  return out;
}

struct ReweightConfig {
  double alpha = 0.5;
  double beta = 0.0;
  double epsilon = 1e-3;
};

// Splits each node's outgoing mass: 1 - alpha to same-group neighbours and
// alpha / R to each of the R foreign groups present among its neighbours.
// Inside every share, neighbour u gets mass proportional to
// w(v, u) * (m(u) + epsilon)^beta. Without same-group neighbours the foreign
// shares are renormalized to 1.
inline BiasedGraph reweight(const AttributedGraph& graph, const GroupPartition& partition,
                            const BoundaryCloseness& closeness, const ReweightConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error("reweight: alpha must be in (0, 1)");
  if (!(cfg.beta >= 0.0)) throw Error("reweight: beta must be >= 0");
  if (!(cfg.epsilon >= 0.0)) throw Error("reweight: epsilon must be >= 0");
  if (closeness.m.size() != graph.node_count() ||
      partition.node_count() != graph.node_count()) {
    throw Error("reweight: closeness/partition do not match graph");
  }

  BiasedGraph out;
  out.alpha = cfg.alpha;
  out.beta = cfg.beta;
  out.epsilon = cfg.epsilon;
  out.out.resize(graph.node_count());

  const std::size_t groups = partition.group_count();
  std::vector<double> score;
  std::vector<double> group_sum(groups);
  std::vector<double> group_base(groups);  // plain weight sums, used if scores vanish

  for (NodeId v = 0; v < graph.node_count(); ++v) {
    auto nbrs = graph.neighbors(v);
    if (nbrs.empty()) continue;
    const auto home = partition.group_of[v];
    std::fill(group_sum.begin(), group_sum.end(), 0.0);
    std::fill(group_base.begin(), group_base.end(), 0.0);
    score.resize(nbrs.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const double mt = closeness.m[nbrs[i].node] + cfg.epsilon;
      score[i] = nbrs[i].weight * std::pow(mt, cfg.beta);
      const auto g = partition.group_of[nbrs[i].node];
      group_sum[g] += score[i];
      group_base[g] += nbrs[i].weight;
    }

    std::size_t foreign_groups = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      if (g != home && group_base[g] > 0.0) ++foreign_groups;
    }
    const bool has_same = group_base[home] > 0.0;
    double same_share = 1.0;
    double foreign_share = 0.0;
    if (foreign_groups > 0) {
      same_share = has_same ? 1.0 - cfg.alpha : 0.0;
      foreign_share = has_same ? cfg.alpha / static_cast<double>(foreign_groups)
                               : 1.0 / static_cast<double>(foreign_groups);
    }

    auto& row = out.out[v];
    row.reserve(nbrs.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const auto g = partition.group_of[nbrs[i].node];
      const double share = g == home ? same_share : foreign_share;
      // With epsilon = 0 a whole group can score zero; fall back to weights.
      const double p = group_sum[g] > 0.0 ? share * score[i] / group_sum[g]
                                          : share * nbrs[i].weight / group_base[g];
      row.push_back({nbrs[i].node, p});
    }
  }
  return out;
}

// One directed line `v<TAB>u<TAB>probability` per outgoing entry.
inline void save_weights(const AttributedGraph& graph, const Adjacency& out,
                         const std::string& path) {
  auto file = detail::open_output(path);
  for (NodeId v = 0; v < out.size(); ++v) {
    for (const auto& nb : out[v]) {
      file << graph.name(v) << '\t' << graph.name(nb.node) << '\t'
           << detail::format_double(nb.weight) << '\n';
    }
  }
  if (!file) throw Error("write failed for '" + path + "'");
}

}  // namespace fairwalk
