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
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairwalk/common.hpp"
#include "fairwalk/graph.hpp"
#include "fairwalk/metrics.hpp"
#include "fairwalk/propagation.hpp"
#include "json.hpp"

namespace fairwalk {

struct EvalConfig {
  std::size_t folds = 25;
  double labeled_fraction = 0.5;
  std::size_t knn_k = 10;
  double sigma = 0.0;  // <= 0: automatic
  std::size_t max_iters = 1000;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct FoldResult {
  std::size_t labeled = 0;
  GroupScores sensitive;
  std::optional<GroupScores> control;
  std::vector<std::string> warnings;
};

struct EvaluationReport {
  std::string sensitive_attribute;
  std::string control_attribute;  // empty when no control attribute
  std::vector<std::string> group_labels;
  std::vector<std::size_t> group_sizes;
  std::vector<FoldResult> folds;
  std::vector<double> mean_q;
  std::vector<double> mean_q_star;
  double awareness = 0.0;
  double disparity = 0.0;
  std::optional<double> performance;
  double sigma = 0.0;
  nlohmann::json meta = nlohmann::json::object();
};

// Stratified labelled subset of size ceil(n * fraction). Each class keeps
// floor(n_c * fraction) labelled nodes; the remaining slots go to the classes
// with the largest fractional share, ties in random order.
inline std::vector<bool> stratified_split(const GroupPartition& strata, double fraction,
                                          Rng& rng) {
  const std::size_t n = strata.node_count();
  const std::size_t classes = strata.group_count();
  std::vector<std::vector<NodeId>> members(classes);
  for (NodeId v = 0; v < n; ++v) members[strata.group_of[v]].push_back(v);
  for (auto& m : members) rng.shuffle(m);

  const auto target =
      static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-12));
  std::vector<std::size_t> take(classes);
  std::vector<double> remainder(classes);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double exact = static_cast<double>(members[c].size()) * fraction;
    take[c] = static_cast<std::size_t>(std::floor(exact + 1e-12));
    remainder[c] = exact - static_cast<double>(take[c]);
    assigned += take[c];
  }
  std::vector<std::size_t> order(classes);
  for (std::size_t c = 0; c < classes; ++c) order[c] = c;
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < target && i < classes; ++i) {
    if (take[order[i]] < members[order[i]].size()) {
      ++take[order[i]];
      ++assigned;
    }
  }

  std::vector<bool> labeled(n, false);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < take[c]; ++i) labeled[members[c][i]] = true;
  }
  return labeled;
}

namespace detail {

inline std::vector<int> as_labels(const GroupPartition& p) {
  return {p.group_of.begin(), p.group_of.end()};
}

inline std::vector<double> fold_mean(const std::vector<FoldResult>& folds, bool control) {
  std::vector<double> mean;
  for (const auto& f : folds) {
    const auto& q = control ? f.control->q : f.sensitive.q;
    if (mean.empty()) mean.assign(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) mean[i] += q[i];
  }
  for (double& m : mean) m /= static_cast<double>(folds.size());
  return mean;
}

}  // namespace detail

// Repeated stratified random splits (`folds` of them, each labelling
// ceil(n * labeled_fraction) nodes). Per fold, labels are propagated over the
// embedding's kNN graph and both attributes are scored on the unlabelled
// nodes. Metrics use the fold-averaged per-group scores.
inline EvaluationReport cross_validate(std::span<const double> points, std::size_t dim,
                                       const GroupPartition& sensitive,
                                       const GroupPartition* control, const EvalConfig& cfg) {
  const std::size_t n = sensitive.node_count();
  if (points.size() != n * dim) throw Error("evaluate: embedding does not match partition");
  if (control && control->node_count() != n) {
    throw Error("evaluate: control partition does not match");
  }
  if (cfg.folds < 1) throw Error("evaluate: folds must be >= 1");
  if (!(cfg.labeled_fraction > 0.0 && cfg.labeled_fraction < 1.0)) {
    throw Error("evaluate: labeled_fraction must be in (0, 1)");
  }
  if (n < 2 * sensitive.group_count()) throw Error("evaluate: need n >= 2C nodes");
  const auto sizes = sensitive.sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 2) {
      throw Error("evaluate: cannot stratify, group '" + sensitive.labels[c] +
                  "' has fewer than 2 nodes");
    }
  }

  const PropagationGraph pg = build_propagation_graph(points, dim, cfg.knn_k, cfg.sigma);
  const auto sens_truth = detail::as_labels(sensitive);
  const auto ctrl_truth = control ? detail::as_labels(*control) : std::vector<int>{};

  EvaluationReport report;
  report.sensitive_attribute = sensitive.attribute;
  report.control_attribute = control ? control->attribute : "";
  report.group_labels = sensitive.labels;
  report.group_sizes = sizes;
  report.sigma = pg.sigma;
  report.folds.resize(cfg.folds);

  parallel_for(cfg.folds, cfg.threads, [&](std::size_t f) {
    Rng rng(derive_seed(cfg.seed, tag_hash("eval.fold"), f));
    const auto labeled = stratified_split(sensitive, cfg.labeled_fraction, rng);
    std::vector<NodeId> eval_set;
    for (NodeId v = 0; v < n; ++v) {
      if (!labeled[v]) eval_set.push_back(v);
    }
    FoldResult& fold = report.folds[f];
    fold.labeled = n - eval_set.size();

    auto run = [&](const std::vector<int>& truth, std::size_t classes) {
      std::vector<int> seeds(n, kUnlabeled);
      for (NodeId v = 0; v < n; ++v) {
        if (labeled[v]) seeds[v] = truth[v];
      }
      auto res = propagate(pg, seeds, classes, cfg.max_iters, cfg.tol);
      for (auto& w : res.warnings) fold.warnings.push_back(std::move(w));
      return res.predict();
    };

    fold.sensitive = per_group_f1(run(sens_truth, sensitive.group_count()), sens_truth,
                                  sensitive, eval_set);
    if (control) {
      fold.control = control_group_f1(run(ctrl_truth, control->group_count()), ctrl_truth,
                                      control->group_count(), control->attribute, sensitive,
                                      eval_set);
    }
  });

  report.mean_q = detail::fold_mean(report.folds, false);
  report.awareness = awareness(report.mean_q);
  report.disparity = disparity(report.mean_q);
  if (control) {
    report.mean_q_star = detail::fold_mean(report.folds, true);
    report.performance = performance(report.mean_q_star);
  }
  return report;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  using nlohmann::json;
  json folds = json::array();
  for (const auto& f : r.folds) {
    json jf = {{"labeled", f.labeled}, {"q", f.sensitive.q}};
    if (f.control) jf["q_star"] = f.control->q;
    if (!f.warnings.empty()) jf["warnings"] = f.warnings;
    folds.push_back(std::move(jf));
  }
  json j = {
      {"sensitive_attribute", r.sensitive_attribute},
      {"control_attribute", r.control_attribute},
      {"group_labels", r.group_labels},
      {"group_sizes", r.group_sizes},
      {"fold_count", r.folds.size()},
      {"folds", std::move(folds)},
      {"q", r.mean_q},
      {"q_star", r.mean_q_star},
      {"awareness", r.awareness},
      {"disparity", r.disparity},
      {"performance", r.performance ? json(*r.performance) : json(nullptr)},
      {"propagation_sigma", r.sigma},
      {"meta", r.meta},
  };
  return j;
}

}  // namespace fairwalk
