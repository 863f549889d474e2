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

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "fairwalk/common.hpp"
#include "json.hpp"

namespace fairwalk {

enum class Intervention { kBaseline, kCrossWalk };

inline std::string to_string(Intervention i) {
  return i == Intervention::kBaseline ? "baseline" : "crosswalk";
}

inline Intervention parse_intervention(const std::string& s) {
  if (s == "baseline") return Intervention::kBaseline;
  if (s == "crosswalk") return Intervention::kCrossWalk;
  throw Error("unknown intervention '" + s + "' (expected baseline|crosswalk)");
}

struct Preset {
  const char* name;
  double alpha;
  double beta;
};

inline constexpr Preset kLowAwareness{"low_awareness", 0.99, 15.0};
inline constexpr Preset kHighAwareness{"high_awareness", 0.01, 1.0};

inline Preset find_preset(const std::string& name) {
  if (name == kLowAwareness.name) return kLowAwareness;
  if (name == kHighAwareness.name) return kHighAwareness;
  throw Error("unknown preset '" + name + "' (expected low_awareness|high_awareness)");
}

// Everything one pipeline run needs. Serialized as a flat JSON object whose
// keys are the member names below.
struct ExperimentConfig {
  // dataset
  std::string dataset = "sbm";  // sbm | files
  std::string dataset_name;     // tag used in sweep tables; defaults to dataset
  std::string edges;
  std::string attrs;
  std::vector<std::size_t> sbm_blocks{100, 200, 400};
  double sbm_p_intra = 0.1;
  double sbm_p_inter = 0.02;
  std::string sbm_block_attribute = "location";
  std::vector<double> sbm_control_probs;  // empty: no control attribute
  double sbm_control_bonus = 0.0;
  std::string sbm_control_attribute = "control";
  std::string age_attribute;  // binned into 16-18 / 19-21 / 22+ when set
  std::string select_attribute;
  std::vector<std::string> select_values;

  std::string sensitive = "location";
  std::string control;  // empty: no control attribute

  // CrossWalk
  Intervention intervention = Intervention::kBaseline;
  double alpha = 0.5;
  double beta = 2.0;
  double epsilon = 1e-3;
  std::size_t closeness_walks = 10;
  std::size_t closeness_length = 5;

  // node2vec
  double p = 1.0;
  double q = 1.0;
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;

  // skip-gram
  std::size_t dim = 64;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr = 0.025;
  bool parallel_embedding = false;

  // evaluation
  std::size_t folds = 25;
  double labeled_fraction = 0.5;
  std::size_t knn_k = 10;
  double sigma = 0.0;
  std::size_t max_iters = 1000;
  double tol = 1e-6;

  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string output_dir;

  std::string tag() const { return dataset_name.empty() ? dataset : dataset_name; }

  void apply_preset(const Preset& preset) {
    intervention = Intervention::kCrossWalk;
    alpha = preset.alpha;
    beta = preset.beta;
  }

  void validate() const {
    if (dataset != "sbm" && dataset != "files") {
      throw Error("config: dataset must be 'sbm' or 'files'");
    }
    if (dataset == "files" && (edges.empty() || attrs.empty())) {
      throw Error("config: dataset 'files' needs edges and attrs");
    }
    if (sensitive.empty()) throw Error("config: sensitive attribute is required");
    if (!control.empty() && control == sensitive) {
      throw Error("config: sensitive and control attribute must differ");
    }
    if (intervention == Intervention::kCrossWalk) {
      if (!(alpha > 0.0 && alpha < 1.0)) throw Error("config: alpha must be in (0, 1)");
      if (!(beta >= 0.0)) throw Error("config: beta must be >= 0");
    }
    if (!(p > 0.0 && q > 0.0)) throw Error("config: p and q must be > 0");
    if (walks_per_node < 1 || walk_length < 1) throw Error("config: walk sizes must be >= 1");
    if (closeness_walks < 1 || closeness_length < 1) {
      throw Error("config: closeness walk sizes must be >= 1");
    }
    if (dim < 2) throw Error("config: dim must be >= 2");
    if (!(lr > 0.0)) throw Error("config: lr must be > 0");
    if (folds < 1) throw Error("config: folds must be >= 1");
    if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0)) {
      throw Error("config: labeled_fraction must be in (0, 1)");
    }
    if (knn_k < 1) throw Error("config: knn_k must be >= 1");
  }
};

#define FAIRWALK_CONFIG_FIELDS(X)                                                     \
  X(dataset) X(dataset_name) X(edges) X(attrs) X(sbm_blocks) X(sbm_p_intra)          \
  X(sbm_p_inter) X(sbm_block_attribute) X(sbm_control_probs) X(sbm_control_bonus)    \
  X(sbm_control_attribute) X(age_attribute) X(select_attribute) X(select_values)     \
  X(sensitive) X(control) X(alpha) X(beta) X(epsilon) X(closeness_walks)             \
  X(closeness_length) X(p) X(q) X(walks_per_node) X(walk_length) X(dim) X(window)    \
  X(negatives) X(epochs) X(lr) X(parallel_embedding) X(folds) X(labeled_fraction)    \
  X(knn_k) X(sigma) X(max_iters) X(tol) X(seed) X(threads) X(output_dir)

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
#define X(name) j[#name] = c.name;
  FAIRWALK_CONFIG_FIELDS(X)
#undef X
  j["intervention"] = to_string(c.intervention);
  return j;
}

// Missing keys keep their defaults; unknown keys are an error.
inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         ExperimentConfig c = ExperimentConfig{}) {
  if (!j.is_object()) throw Error("config: expected a JSON object");
  static const std::set<std::string> known = [] {
    std::set<std::string> k{"intervention"};
#define X(name) k.insert(#name);
    FAIRWALK_CONFIG_FIELDS(X)
#undef X
    return k;
  }();
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error("config: unknown key '" + key + "'");
  }
  try {
#define X(name) \
  if (j.contains(#name)) j.at(#name).get_to(c.name);
    FAIRWALK_CONFIG_FIELDS(X)
#undef X
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (j.contains("intervention")) {
    c.intervention = parse_intervention(j.at("intervention").get<std::string>());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace fairwalk
