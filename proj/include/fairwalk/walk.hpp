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

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"

namespace fairwalk {

struct WalkConfig {
  double p = 1.0;  // return
  double q = 1.0;  // in-out
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct WalkSource {
  bool crosswalk = false;
  double alpha = 0.0;
  double beta = 0.0;
};

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  WalkConfig config;
  WalkSource source;
};

namespace detail {

// Unnormalized second-order scores for the neighbours of `cur`, aligned with
// weights[cur]. Neighbourhood tests use weights[prev].
inline void second_order_scores(const Adjacency& weights, std::optional<NodeId> prev,
                                NodeId cur, double p, double q, std::vector<double>& out) {
  const auto& nbrs = weights[cur];
  out.resize(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    double bias = 1.0;
    if (prev) {
      const NodeId x = nbrs[i].node;
      if (x == *prev) {
        bias = 1.0 / p;
      } else if (!is_neighbor(weights[*prev], x)) {
        bias = 1.0 / q;
      }
    }
    out[i] = nbrs[i].weight * bias;
  }
}

}  // namespace detail

// Next-step distribution of a node2vec walk at `cur` having arrived from
// `prev` (nullopt on the first step). Aligned with weights[cur]; empty when
// cur has no outgoing weight.
inline std::vector<double> transition_distribution(const Adjacency& weights,
                                                   std::optional<NodeId> prev, NodeId cur,
                                                   double p, double q) {
  if (!(p > 0.0 && q > 0.0)) throw Error("transition: p and q must be > 0");
  std::vector<double> probs;
  detail::second_order_scores(weights, prev, cur, p, q, probs);
  double total = 0.0;
  for (double s : probs) total += s;
  if (!(total > 0.0)) return {};
  for (double& s : probs) s /= total;
  return probs;
}

// Draws the next node, or nullopt when the walk cannot continue.
inline std::optional<NodeId> sample_step(const Adjacency& weights, std::optional<NodeId> prev,
                                         NodeId cur, double p, double q, Rng& rng,
                                         std::vector<double>& scratch) {
  detail::second_order_scores(weights, prev, cur, p, q, scratch);
  const std::size_t i = sample_index(scratch, rng);
  if (i == scratch.size()) return std::nullopt;
  return weights[cur][i].node;
}

// walks_per_node epochs; each epoch visits every root once in a freshly
// shuffled order. Each walk has its own generator keyed on (seed, root,
// epoch), so the corpus is independent of the thread count.
inline WalkCorpus generate_walks(const Adjacency& weights, const WalkConfig& cfg) {
  if (weights.empty()) throw Error("walks: empty graph");
  if (!(cfg.p > 0.0 && cfg.q > 0.0)) throw Error("walks: p and q must be > 0");
  if (cfg.walks_per_node < 1 || cfg.walk_length < 1) {
    throw Error("walks: walks_per_node and walk_length must be >= 1");
  }
  const std::size_t n = weights.size();
  std::vector<NodeId> roots(n * cfg.walks_per_node);
  for (std::size_t e = 0; e < cfg.walks_per_node; ++e) {
    std::vector<NodeId> order(n);
    for (std::size_t v = 0; v < n; ++v) order[v] = static_cast<NodeId>(v);
    Rng rng(derive_seed(cfg.seed, tag_hash("walk.epoch"), e));
    rng.shuffle(order);
    std::copy(order.begin(), order.end(), roots.begin() + static_cast<std::ptrdiff_t>(e * n));
  }

  WalkCorpus corpus;
  corpus.config = cfg;
  corpus.walks.resize(roots.size());
  parallel_for(roots.size(), cfg.threads, [&](std::size_t slot) {
    const NodeId root = roots[slot];
    const std::size_t epoch = slot / n;
    Rng rng(derive_seed(cfg.seed, root, epoch));
    std::vector<double> scratch;
    auto& walk = corpus.walks[slot];
    walk.reserve(cfg.walk_length + 1);
    walk.push_back(root);
    std::optional<NodeId> prev;
    NodeId cur = root;
    for (std::size_t step = 0; step < cfg.walk_length; ++step) {
      auto next = sample_step(weights, prev, cur, cfg.p, cfg.q, rng, scratch);
      if (!next) break;
      walk.push_back(*next);
      prev = cur;
      cur = *next;
    }
  });
  return corpus;
}

// Node names plus outgoing weights, as read back from an edge-list file.
struct WeightTable {
  std::vector<std::string> names;
  Adjacency out;
};

// Reads `u v [weight]` lines. Undirected files add both directions; directed
// files (as written by save_weights) add u -> v only and accept zero weights.
// Ids follow first appearance.
inline WeightTable load_weight_table(const std::string& path, bool directed) {
  auto in = detail::open_input(path);
  WeightTable table;
  std::unordered_map<std::string, NodeId> ids;
  auto id_of = [&](std::string_view name) {
    auto [it, fresh] = ids.emplace(std::string(name), static_cast<NodeId>(table.names.size()));
    if (fresh) {
      table.names.emplace_back(name);
      table.out.emplace_back();
    }
    return it->second;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    auto fields = detail::split_ws(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(path, lineno, "expected 'u v [weight]'");
    }
    double w = 1.0;
    if (fields.size() == 3) {
      auto parsed = detail::parse_double(fields[2]);
      const bool ok = parsed && std::isfinite(*parsed) &&
                      (directed ? *parsed >= 0.0 : *parsed > 0.0);
      if (!ok) throw ParseError(path, lineno, "invalid weight");
      w = *parsed;
    }
    if (fields[0] == fields[1]) continue;
    const NodeId u = id_of(fields[0]);
    const NodeId v = id_of(fields[1]);
    table.out[u].push_back({v, w});
    if (!directed) table.out[v].push_back({u, w});
  }
  for (auto& row : table.out) {
    std::sort(row.begin(), row.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    std::vector<Neighbor> merged;
    for (const auto& nb : row) {
      if (!merged.empty() && merged.back().node == nb.node) {
        merged.back().weight += nb.weight;
      } else {
        merged.push_back(nb);
      }
    }
    row = std::move(merged);
  }
  return table;
}

// One walk per line, node names separated by single spaces.
inline void save_corpus(const WalkCorpus& corpus, const std::vector<std::string>& names,
                        const std::string& path) {
  auto out = detail::open_output(path);
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << names[walk[i]];
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

struct NamedCorpus {
  std::vector<std::string> names;  // id -> name, by first appearance
  std::vector<std::vector<NodeId>> walks;
};

inline NamedCorpus load_corpus(const std::string& path) {
  auto in = detail::open_input(path);
  NamedCorpus corpus;
  std::unordered_map<std::string, NodeId> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    auto& walk = corpus.walks.emplace_back();
    for (auto t : tokens) {
      auto [it, fresh] = ids.emplace(std::string(t), static_cast<NodeId>(corpus.names.size()));
      if (fresh) corpus.names.emplace_back(t);
      walk.push_back(it->second);
    }
  }
  if (corpus.walks.empty()) throw Error("corpus '" + path + "' is empty");
  return corpus;
}

}  // namespace fairwalk
