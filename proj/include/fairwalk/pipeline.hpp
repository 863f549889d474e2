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

#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fairwalk/config.hpp"
#include "fairwalk/crosswalk.hpp"
#include "fairwalk/csv.hpp"
#include "fairwalk/embed.hpp"
#include "fairwalk/evaluate.hpp"
#include "fairwalk/graph.hpp"
#include "fairwalk/pca.hpp"
#include "fairwalk/sbm.hpp"
#include "fairwalk/walk.hpp"
#include "json.hpp"

namespace fairwalk {

// Stage seeds. The master seed determines every stochastic stage through a
// fixed tag per stage.
struct StageSeeds {
  std::uint64_t sbm, closeness, walks, embed, eval;

  explicit StageSeeds(std::uint64_t master)
      : sbm(derive_seed(master, "stage.sbm")),
        closeness(derive_seed(master, "stage.closeness")),
        walks(derive_seed(master, "stage.walks")),
        embed(derive_seed(master, "stage.embed")),
        eval(derive_seed(master, "stage.eval")) {}
};

// Memoizes stage artifacts by the canonical JSON of their upstream inputs, so
// sweeps over (alpha, beta) reuse the dataset and closeness estimates.
// Thread-safe; concurrent requests for one key compute it once.
class StageCache {
 public:
  template <typename T>
  std::shared_ptr<const T> get_or_compute(const std::string& key,
                                          const std::function<T()>& compute) {
    std::promise<std::shared_ptr<const void>> promise;
    std::shared_future<std::shared_ptr<const void>> future;
    bool owner = false;
    {
      std::lock_guard lock(mu_);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        future = promise.get_future().share();
        entries_.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const T>(compute()));
      } catch (...) {
        {
          std::lock_guard lock(mu_);
          entries_.erase(key);
        }
        promise.set_exception(std::current_exception());
      }
    }
    return std::static_pointer_cast<const T>(future.get());
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const void>>> entries_;
};

struct Dataset {
  AttributedGraph graph;
  nlohmann::json summary;
};

struct RunResult {
  ExperimentConfig config;
  std::shared_ptr<const Dataset> dataset;
  std::shared_ptr<const EmbeddingMatrix> embedding;
  EvaluationReport report;
};

namespace detail {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.what(), stage);
  } catch (const std::exception& e) {
    throw Error(e.what(), stage);
  }
}

inline nlohmann::json dataset_key(const ExperimentConfig& c) {
  nlohmann::json j = {{"dataset", c.dataset},
                      {"age_attribute", c.age_attribute},
                      {"select_attribute", c.select_attribute},
                      {"select_values", c.select_values}};
  if (c.dataset == "sbm") {
    j["sbm"] = {c.sbm_blocks,          c.sbm_p_intra,       c.sbm_p_inter,
                c.sbm_block_attribute, c.sbm_control_probs, c.sbm_control_bonus,
                c.sbm_control_attribute, StageSeeds(c.seed).sbm};
  } else {
    j["files"] = {c.edges, c.attrs};
  }
  return j;
}

inline nlohmann::json embedding_key(const ExperimentConfig& c) {
  nlohmann::json j = dataset_key(c);
  j["walk"] = {c.p, c.q, c.walks_per_node, c.walk_length, c.seed};
  j["embed"] = {c.dim, c.window, c.negatives, c.epochs, c.lr, c.parallel_embedding};
  if (c.intervention == Intervention::kCrossWalk) {
    j["crosswalk"] = {c.sensitive, c.alpha,           c.beta,
                      c.epsilon,   c.closeness_walks, c.closeness_length};
  }
  return j;
}

inline nlohmann::json report_meta(const ExperimentConfig& c, const Dataset& d) {
  nlohmann::json cfg = to_json(c);
  cfg.erase("output_dir");
  cfg.erase("threads");
  if (c.intervention == Intervention::kBaseline) {
    cfg.erase("alpha");
    cfg.erase("beta");
  }
  const StageSeeds seeds(c.seed);
  return {{"config", cfg},
          {"dataset", d.summary},
          {"seeds",
           {{"sbm", seeds.sbm},
            {"closeness", seeds.closeness},
            {"walks", seeds.walks},
            {"embed", seeds.embed},
            {"eval", seeds.eval}}},
          {"knn_graph", "union of k nearest neighbours, rbf weights"},
          {"f1", "sensitive: one-vs-rest per group; control: macro per sensitive group"}};
}

}  // namespace detail

inline Dataset build_dataset(const ExperimentConfig& c) {
  Dataset d;
  IngestReport ingest;
  nlohmann::json generator;
  if (c.dataset == "sbm") {
    SbmSpec spec;
    spec.block_sizes = c.sbm_blocks;
    spec.p_intra = c.sbm_p_intra;
    spec.p_inter = c.sbm_p_inter;
    spec.block_attribute = c.sbm_block_attribute;
    spec.seed = StageSeeds(c.seed).sbm;
    if (!c.sbm_control_probs.empty()) {
      spec.control = ControlAttributeSpec{c.sbm_control_attribute, c.sbm_control_probs,
                                          c.sbm_control_bonus};
    }
    auto sbm = generate_sbm(spec);
    d.graph = std::move(sbm.graph);
    generator = {{"sampled_edges", sbm.sampled_edges},
                 {"isolated_removed", sbm.isolated_removed}};
  } else {
    d.graph = load_graph(c.edges, c.attrs, &ingest);
  }
  if (!c.age_attribute.empty()) d.graph = bin_age_attribute(d.graph, c.age_attribute, &ingest);
  if (!c.select_attribute.empty()) {
    d.graph = select_subgraph(d.graph, c.select_attribute,
                              {c.select_values.begin(), c.select_values.end()});
  }
  d.summary = graph_summary(d.graph);
  if (!generator.is_null()) d.summary["generator"] = generator;
  d.summary["ingest"] = {{"self_loops_dropped", ingest.self_loops_dropped},
                         {"duplicates_merged", ingest.duplicates_merged},
                         {"dropped_missing_attribute", ingest.dropped_missing_attribute},
                         {"dropped_invalid_age", ingest.dropped_invalid_age},
                         {"dropped_isolated", ingest.dropped_isolated}};
  return d;
}

// Biased (or plain) walk weights for the configured intervention.
inline Adjacency walk_weights(const ExperimentConfig& c, const AttributedGraph& graph,
                              StageCache* cache = nullptr) {
  if (c.intervention == Intervention::kBaseline) return graph.adjacency();
  const auto partition = partition_by(graph, c.sensitive);
  ClosenessConfig cc;
  cc.walks_per_node = c.closeness_walks;
  cc.walk_length = c.closeness_length;
  cc.seed = StageSeeds(c.seed).closeness;
  cc.threads = c.threads;
  std::function<BoundaryCloseness()> compute = [&] {
    return estimate_closeness(graph, partition, cc);
  };
  std::shared_ptr<const BoundaryCloseness> closeness;
  if (cache) {
    nlohmann::json key = detail::dataset_key(c);
    key["closeness"] = {c.sensitive, c.closeness_walks, c.closeness_length};
    closeness = cache->get_or_compute<BoundaryCloseness>(key.dump(), compute);
  } else {
    closeness = std::make_shared<const BoundaryCloseness>(compute());
  }
  return reweight(graph, partition, *closeness, {c.alpha, c.beta, c.epsilon}).out;
}

inline EmbedConfig embed_config(const ExperimentConfig& c) {
  EmbedConfig e;
  e.dim = c.dim;
  e.window = c.window;
  e.negatives = c.negatives;
  e.epochs = c.epochs;
  e.lr = c.lr;
  e.seed = StageSeeds(c.seed).embed;
  e.parallel = c.parallel_embedding;
  e.threads = c.threads;
  return e;
}

inline EvalConfig eval_config(const ExperimentConfig& c) {
  EvalConfig e;
  e.folds = c.folds;
  e.labeled_fraction = c.labeled_fraction;
  e.knn_k = c.knn_k;
  e.sigma = c.sigma;
  e.max_iters = c.max_iters;
  e.tol = c.tol;
  e.seed = StageSeeds(c.seed).eval;
  e.threads = c.threads;
  return e;
}

// Dataset -> optional CrossWalk biasing -> node2vec walks -> skip-gram ->
// cross-validated label propagation for the sensitive and control attribute.
// Errors carry the name of the stage that raised them.
inline RunResult run_experiment(const ExperimentConfig& c, StageCache* cache = nullptr) {
  detail::run_stage("config", [&] { c.validate(); });
  RunResult r;
  r.config = c;

  std::function<Dataset()> make_dataset = [&] { return build_dataset(c); };
  r.dataset = detail::run_stage("dataset", [&] {
    return cache ? cache->get_or_compute<Dataset>(detail::dataset_key(c).dump(), make_dataset)
                 : std::make_shared<const Dataset>(make_dataset());
  });
  const AttributedGraph& graph = r.dataset->graph;

  const auto [sensitive, control] = detail::run_stage("partition", [&] {
    auto s = partition_by(graph, c.sensitive);
    std::optional<GroupPartition> ctl;
    if (!c.control.empty()) ctl = partition_by(graph, c.control);
    return std::pair{std::move(s), std::move(ctl)};
  });

  std::function<EmbeddingMatrix()> make_embedding = [&] {
    const Adjacency weights =
        detail::run_stage("bias", [&] { return walk_weights(c, graph, cache); });
    WalkConfig wc;
    wc.p = c.p;
    wc.q = c.q;
    wc.walks_per_node = c.walks_per_node;
    wc.walk_length = c.walk_length;
    wc.seed = StageSeeds(c.seed).walks;
    wc.threads = c.threads;
    const auto corpus = detail::run_stage("walk", [&] { return generate_walks(weights, wc); });
    return detail::run_stage("embed", [&] {
      return train(corpus.walks, graph.node_count(), embed_config(c));
    });
  };
  r.embedding = cache ? cache->get_or_compute<EmbeddingMatrix>(
                            detail::embedding_key(c).dump(), make_embedding)
                      : std::make_shared<const EmbeddingMatrix>(make_embedding());

  r.report = detail::run_stage("eval", [&] {
    return cross_validate(r.embedding->input, r.embedding->dim, sensitive,
                          control ? &*control : nullptr, eval_config(c));
  });
  r.report.meta = detail::report_meta(c, *r.dataset);
  r.report.meta["embedding"] = {{"dim", c.dim},
                                {"window", c.window},
                                {"negatives", c.negatives},
                                {"epochs", c.epochs},
                                {"lr", c.lr},
                                {"lr_final", c.lr / 100.0},
                                {"epoch_loss", r.embedding->epoch_loss}};
  return r;
}

// ---------------------------------------------------------------------------
// Result rows. Column set is versioned; summarize() reads only these columns.
// ---------------------------------------------------------------------------

inline constexpr int kCsvSchemaVersion = 1;

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "schema_version", "key",         "dataset",     "intervention", "alpha",
      "beta",           "p",           "q",           "sensitive",    "control",
      "awareness",      "disparity",   "performance", "group_labels", "group_sizes",
      "q_per_group",    "q_star_per_group", "status", "error"};
  return cols;
}

// Shortest decimal that round-trips.
inline std::string num(double x) { return nlohmann::json(x).dump(); }

inline std::string run_key(const ExperimentConfig& c) {
  std::string key = c.tag() + "|" + to_string(c.intervention);
  if (c.intervention == Intervention::kCrossWalk) {
    key += "|alpha=" + num(c.alpha) + "|beta=" + num(c.beta);
  }
  return key + "|p=" + num(c.p) + "|q=" + num(c.q);
}

inline std::vector<std::string> csv_row(const ExperimentConfig& c,
                                        const EvaluationReport* report,
                                        const std::string& error = {}) {
  const bool cw = c.intervention == Intervention::kCrossWalk;
  std::vector<std::string> row{std::to_string(kCsvSchemaVersion),
                               run_key(c),
                               c.tag(),
                               to_string(c.intervention),
                               cw ? num(c.alpha) : "",
                               cw ? num(c.beta) : "",
                               num(c.p),
                               num(c.q),
                               c.sensitive,
                               c.control};
  if (report) {
    auto fmt = [](double x) { return num(x); };
    row.push_back(num(report->awareness));
    row.push_back(num(report->disparity));
    row.push_back(report->performance ? num(*report->performance) : "");
    row.push_back(csv::join_list(report->group_labels, [](const std::string& s) { return s; }));
    row.push_back(csv::join_list(report->group_sizes,
                                 [](std::size_t s) { return std::to_string(s); }));
    row.push_back(csv::join_list(report->mean_q, fmt));
    row.push_back(csv::join_list(report->mean_q_star, fmt));
    row.push_back("ok");
    row.push_back("");
  } else {
    for (int i = 0; i < 7; ++i) row.push_back("");
    row.push_back("error");
    row.push_back(error);
  }
  return row;
}

// report.json, report.csv, embeddings.txt and pca.csv (`node_id,x,y,group`).
// Files are written under temporary names and renamed only when all of them
// succeeded.
inline void write_run_outputs(const RunResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& graph = r.dataset->graph;
  const std::vector<std::string> finals{"report.json", "report.csv", "embeddings.txt",
                                        "pca.csv"};
  std::vector<fs::path> temps;
  for (const auto& f : finals) temps.push_back(fs::path(dir) / (f + ".partial"));
  try {
    {
      auto out = detail::open_output(temps[0].string());
      out << to_json(r.report).dump(2) << '\n';
    }
    {
      auto out = detail::open_output(temps[1].string());
      out << csv::join_row(csv_columns()) << '\n'
          << csv::join_row(csv_row(r.config, &r.report)) << '\n';
    }
    save_embeddings(*r.embedding, graph.names(), temps[2].string());
    {
      const auto pca = principal_components(r.embedding->input, r.embedding->dim, 2);
      const auto& groups = graph.attribute(r.config.sensitive);
      auto out = detail::open_output(temps[3].string());
      out << "node_id,x,y,group\n";
      for (NodeId v = 0; v < graph.node_count(); ++v) {
        out << csv::quote(graph.name(v)) << ',' << detail::format_double(pca.projection[2 * v])
            << ',' << detail::format_double(pca.projection[2 * v + 1]) << ','
            << csv::quote(groups[v]) << '\n';
      }
      if (!out) throw Error("write failed for pca.csv");
    }
    for (std::size_t i = 0; i < finals.size(); ++i) {
      fs::rename(temps[i], fs::path(dir) / finals[i]);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

}  // namespace fairwalk
