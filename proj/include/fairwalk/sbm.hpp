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
#include <vector>

#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"
#include "json.hpp"

namespace fairwalk {

// A second planted attribute, drawn per node independently of the block.
// Pairs sharing a class get `intra_bonus` added to their edge probability.
struct ControlAttributeSpec {
  std::string name = "control";
  std::vector<double> class_probs;
  double intra_bonus = 0.0;
};

struct SbmSpec {
  std::vector<std::size_t> block_sizes;
  double p_intra = 0.1;
  double p_inter = 0.01;
  std::string block_attribute = "location";
  std::optional<ControlAttributeSpec> control;
  std::uint64_t seed = 0;
};

struct SbmResult {
  AttributedGraph graph;
  std::size_t sampled_edges = 0;
  std::size_t isolated_removed = 0;
  nlohmann::json summary;
};

namespace detail {

inline std::vector<std::string> padded_labels(const std::string& prefix, std::size_t count) {
  std::size_t width = std::to_string(count == 0 ? 0 : count - 1).size();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string digits = std::to_string(i);
    out.push_back(prefix + std::string(width - digits.size(), '0') + digits);
  }
  return out;
}

}  // namespace detail

// Planted-partition graph: node i in block b(i), edge (i, j) present with
// probability p_intra or p_inter (plus the control bonus when both share a
// control class). Block labels are `L0, L1, ...` and control labels
// `c0, c1, ...`, zero-padded so that lexicographic order equals index order.
// Isolated nodes are removed and counted.
inline SbmResult generate_sbm(const SbmSpec& spec) {
  if (spec.block_sizes.empty()) throw Error("sbm: no blocks");
  for (auto s : spec.block_sizes) {
    if (s < 1) throw Error("sbm: block sizes must be >= 1");
  }
  if (!(0.0 <= spec.p_inter && spec.p_inter <= spec.p_intra && spec.p_intra <= 1.0)) {
    throw Error("sbm: require 0 <= p_inter <= p_intra <= 1");
  }

  std::vector<std::uint32_t> block;
  for (std::uint32_t b = 0; b < spec.block_sizes.size(); ++b) {
    block.insert(block.end(), spec.block_sizes[b], b);
  }
  const std::size_t n = block.size();

  std::vector<std::uint32_t> control_class;
  std::vector<std::string> control_labels;
  if (spec.control) {
    const auto& probs = spec.control->class_probs;
    if (probs.size() < 2) throw Error("sbm: control attribute needs >= 2 classes");
    for (double p : probs) {
      if (!(p >= 0.0)) throw Error("sbm: control class probabilities must be >= 0");
    }
    if (!(spec.control->intra_bonus >= 0.0)) throw Error("sbm: intra_bonus must be >= 0");
    Rng rng(derive_seed(spec.seed, "sbm.control"));
    control_class.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      auto c = sample_index(probs, rng);
      if (c == probs.size()) throw Error("sbm: control class probabilities sum to zero");
      control_class[v] = static_cast<std::uint32_t>(c);
    }
    control_labels = detail::padded_labels("c", probs.size());
  }

  Rng rng(derive_seed(spec.seed, "sbm.edges"));
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      double p = block[i] == block[j] ? spec.p_intra : spec.p_inter;
      if (spec.control && control_class[i] == control_class[j]) {
        p = std::min(1.0, p + spec.control->intra_bonus);
      }
      if (rng.bernoulli(p)) edges.push_back({i, j, 1.0});
    }
  }

  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t v = 0; v < n; ++v) names.push_back(std::to_string(v));
  auto block_labels = detail::padded_labels("L", spec.block_sizes.size());
  std::vector<std::string> attr_names{spec.block_attribute};
  std::vector<std::vector<std::string>> attr_values(1);
  for (auto b : block) attr_values[0].push_back(block_labels[b]);
  if (spec.control) {
    if (spec.control->name == spec.block_attribute) {
      throw Error("sbm: control attribute name must differ from block attribute");
    }
    attr_names.push_back(spec.control->name);
    attr_values.emplace_back();
    for (auto c : control_class) attr_values[1].push_back(control_labels[c]);
  }

  SbmResult result;
  result.sampled_edges = edges.size();
  AttributedGraph full(std::move(names), std::move(edges), std::move(attr_names),
                       std::move(attr_values));
  auto keep = detail::non_isolated(full);
  result.isolated_removed = detail::count_false(keep);
  result.graph = result.isolated_removed ? full.induced(keep) : std::move(full);
  if (result.graph.node_count() == 0) throw Error("sbm: every node is isolated");
  result.summary = graph_summary(result.graph);
  result.summary["isolated_removed"] = result.isolated_removed;
  return result;
}

}  // namespace fairwalk
