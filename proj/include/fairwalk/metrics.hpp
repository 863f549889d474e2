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
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"

namespace fairwalk {

// Per-group F1 scores, indexed by sensitive group.
struct GroupScores {
  std::string attribute;
  std::vector<double> q;
  // Groups whose F1 was undefined (no positives at all) and reported as 0.
  std::vector<bool> undefined;
};

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  // 2TP / (2TP + FP + FN), or -1 when there are no positives at all.
  double f1() const {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : -1.0;
  }
};

inline std::vector<ClassCounts> confusion_counts(std::span<const int> predicted,
                                                 std::span<const int> truth,
                                                 std::span<const NodeId> eval_set,
                                                 std::size_t classes) {
  std::vector<ClassCounts> counts(classes);
  for (NodeId v : eval_set) {
    const auto p = static_cast<std::size_t>(predicted[v]);
    const auto t = static_cast<std::size_t>(truth[v]);
    if (p >= classes || t >= classes) throw Error("f1: class index out of range");
    if (p == t) {
      ++counts[t].tp;
    } else {
      ++counts[p].fp;
      ++counts[t].fn;
    }
  }
  return counts;
}

// One-vs-rest F1 per sensitive group over the evaluation nodes.
inline GroupScores per_group_f1(std::span<const int> predicted, std::span<const int> truth,
                                const GroupPartition& sensitive,
                                std::span<const NodeId> eval_set) {
  GroupScores out;
  out.attribute = sensitive.attribute;
  for (const auto& c : confusion_counts(predicted, truth, eval_set, sensitive.group_count())) {
    const double f = c.f1();
    out.q.push_back(f < 0.0 ? 0.0 : f);
    out.undefined.push_back(f < 0.0);
  }
  return out;
}

// Macro F1 over the classes present (in truth or prediction) among `eval_set`.
inline double macro_f1(std::span<const int> predicted, std::span<const int> truth,
                       std::span<const NodeId> eval_set, std::size_t classes) {
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& c : confusion_counts(predicted, truth, eval_set, classes)) {
    const double f = c.f1();
    if (f < 0.0) continue;
    sum += f;
    ++present;
  }
  return present ? sum / static_cast<double>(present) : 0.0;
}

// Q*_i: macro F1 of the control-attribute prediction restricted to
// evaluation nodes in sensitive group i.
inline GroupScores control_group_f1(std::span<const int> predicted, std::span<const int> truth,
                                    std::size_t control_classes, const std::string& attribute,
                                    const GroupPartition& sensitive,
                                    std::span<const NodeId> eval_set) {
  GroupScores out;
  out.attribute = attribute;
  std::vector<std::vector<NodeId>> by_group(sensitive.group_count());
  for (NodeId v : eval_set) by_group[sensitive.group_of[v]].push_back(v);
  for (const auto& members : by_group) {
    out.q.push_back(macro_f1(predicted, truth, members, control_classes));
    out.undefined.push_back(members.empty());
  }
  return out;
}

inline double awareness(std::span<const double> q) {
  if (q.empty()) throw Error("awareness: empty score vector");
  return *std::max_element(q.begin(), q.end());
}

// Population variance (divides by C).
inline double disparity(std::span<const double> q) {
  if (q.empty()) throw Error("disparity: empty score vector");
  const double n = static_cast<double>(q.size());
  const double mean = std::accumulate(q.begin(), q.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : q) ss += (x - mean) * (x - mean);
  return ss / n;
}

inline double performance(std::span<const double> q_star) {
  if (q_star.empty()) throw Error("performance: empty score vector");
  return std::accumulate(q_star.begin(), q_star.end(), 0.0) /
         static_cast<double>(q_star.size());
}

}  // namespace fairwalk
