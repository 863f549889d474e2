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

// fairwalk: command line front end for the CrossWalk / node2vec fairness
// pipeline. Every stage is available on its own, working on files.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairwalk.hpp"

namespace {

using fairwalk::ExperimentConfig;
using Applier = std::function<void(ExperimentConfig&)>;

// Registers --flag bound to ExperimentConfig::*member; the value is applied
// over the config file only when the flag was given.
template <typename T>
void override_flag(CLI::App* app, std::vector<Applier>& appliers, const std::string& flag,
                   T ExperimentConfig::*member, const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = app->add_option(flag, *value, help);
  if constexpr (std::is_same_v<T, std::vector<std::size_t>> ||
                std::is_same_v<T, std::vector<double>> ||
                std::is_same_v<T, std::vector<std::string>>) {
    opt->delimiter(',');
  }
  appliers.push_back([value, opt, member](ExperimentConfig& c) {
    if (opt->count() > 0) c.*member = *value;
  });
}

struct ConfigFlags {
  std::string config_path;
  std::string preset;
  std::string intervention;
  std::vector<Applier> appliers;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "Flat JSON experiment config");
    app->add_option("--preset", preset, "low_awareness | high_awareness")
        ->check(CLI::IsMember({"low_awareness", "high_awareness"}));
    app->add_option("--intervention", intervention, "baseline | crosswalk")
        ->check(CLI::IsMember({"baseline", "crosswalk"}));
    auto& a = appliers;
    override_flag(app, a, "--dataset", &ExperimentConfig::dataset, "sbm | files");
    override_flag(app, a, "--dataset-name", &ExperimentConfig::dataset_name, "Tag for tables");
    override_flag(app, a, "--edges", &ExperimentConfig::edges, "Edge list file");
    override_flag(app, a, "--attrs", &ExperimentConfig::attrs, "Attribute table");
    override_flag(app, a, "--sbm-blocks", &ExperimentConfig::sbm_blocks, "Block sizes");
    override_flag(app, a, "--sbm-p-intra", &ExperimentConfig::sbm_p_intra, "Intra-block p");
    override_flag(app, a, "--sbm-p-inter", &ExperimentConfig::sbm_p_inter, "Inter-block p");
    override_flag(app, a, "--sbm-control-probs", &ExperimentConfig::sbm_control_probs,
                  "Control class probabilities");
    override_flag(app, a, "--sbm-control-bonus", &ExperimentConfig::sbm_control_bonus,
                  "Same-control-class edge bonus");
    override_flag(app, a, "--age-attribute", &ExperimentConfig::age_attribute,
                  "Attribute holding raw ages to bin");
    override_flag(app, a, "--select-attribute", &ExperimentConfig::select_attribute,
                  "Attribute for subgraph selection");
    override_flag(app, a, "--select-values", &ExperimentConfig::select_values,
                  "Allowed values for subgraph selection");
    override_flag(app, a, "--sensitive", &ExperimentConfig::sensitive, "Sensitive attribute");
    override_flag(app, a, "--control", &ExperimentConfig::control, "Control attribute");
    override_flag(app, a, "--alpha", &ExperimentConfig::alpha, "CrossWalk alpha");
    override_flag(app, a, "--beta", &ExperimentConfig::beta, "CrossWalk beta");
    override_flag(app, a, "--epsilon", &ExperimentConfig::epsilon, "Closeness smoothing");
    override_flag(app, a, "--closeness-walks", &ExperimentConfig::closeness_walks,
                  "Closeness walks per node");
    override_flag(app, a, "--closeness-length", &ExperimentConfig::closeness_length,
                  "Closeness walk length");
    override_flag(app, a, "--p", &ExperimentConfig::p, "node2vec return parameter");
    override_flag(app, a, "--q", &ExperimentConfig::q, "node2vec in-out parameter");
    override_flag(app, a, "--walks-per-node", &ExperimentConfig::walks_per_node,
                  "Walks per node");
    override_flag(app, a, "--walk-length", &ExperimentConfig::walk_length, "Walk length");
    override_flag(app, a, "--dim", &ExperimentConfig::dim, "Embedding dimension");
    override_flag(app, a, "--window", &ExperimentConfig::window, "Skip-gram window");
    override_flag(app, a, "--negatives", &ExperimentConfig::negatives, "Negative samples");
    override_flag(app, a, "--epochs", &ExperimentConfig::epochs, "Training epochs");
    override_flag(app, a, "--lr", &ExperimentConfig::lr, "Initial learning rate");
    override_flag(app, a, "--parallel-embedding", &ExperimentConfig::parallel_embedding,
                  "Lock-free multi-threaded training (not reproducible)");
    override_flag(app, a, "--folds", &ExperimentConfig::folds, "Evaluation splits");
    override_flag(app, a, "--labeled-fraction", &ExperimentConfig::labeled_fraction,
                  "Share of labelled nodes per split");
    override_flag(app, a, "--knn-k", &ExperimentConfig::knn_k, "Propagation graph k");
    override_flag(app, a, "--sigma", &ExperimentConfig::sigma, "RBF bandwidth (0 = auto)");
    override_flag(app, a, "--seed", &ExperimentConfig::seed, "Master seed");
    override_flag(app, a, "--threads", &ExperimentConfig::threads, "Worker threads (0 = all)");
    override_flag(app, a, "--out", &ExperimentConfig::output_dir, "Output directory");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{}
                                             : fairwalk::load_config(config_path);
    for (const auto& apply : appliers) apply(c);
    if (!intervention.empty()) c.intervention = fairwalk::parse_intervention(intervention);
    if (!preset.empty()) c.apply_preset(fairwalk::find_preset(preset));
    return c;
  }
};

void write_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw fairwalk::Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairwalk: CrossWalk-biased node2vec embeddings and fairness evaluation"};
  app.require_subcommand(1);

  // run ----------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run the full pipeline for one configuration");
  ConfigFlags run_flags;
  run_flags.add(run);
  bool print_config = false;
  run->add_flag("--print-config", print_config, "Print the resolved config and exit");
  run->callback([&] {
    ExperimentConfig c = run_flags.resolve();
    if (print_config) {
      std::cout << fairwalk::to_json(c).dump(2) << '\n';
      return;
    }
    auto result = fairwalk::run_experiment(c);
    if (!c.output_dir.empty()) {
      fairwalk::write_run_outputs(result, c.output_dir);
      std::cerr << "wrote " << c.output_dir << "/{report.json,report.csv,embeddings.txt,pca.csv}\n";
    } else {
      std::cout << fairwalk::to_json(result.report).dump(2) << '\n';
    }
  });

  // sweep --------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run a hyperparameter grid, resumable");
  ConfigFlags sweep_flags;
  sweep_flags.add(sweep);
  std::string spec_path, table_path;
  bool full = false, dry_run = false;
  std::vector<std::string> presets;
  unsigned workers = 0;
  std::size_t cap = 0;
  sweep->add_option("--spec", spec_path, "Sweep spec JSON");
  sweep->add_flag("--full-grid", full, "Use the full alpha, beta, p, q grid");
  sweep->add_option("--add-preset", presets, "Add a named preset to the grid");
  sweep->add_option("--workers", workers, "Concurrent runs");
  sweep->add_option("--cap", cap, "Maximum number of runs");
  sweep->add_option("--table", table_path, "Result table (CSV, appended)");
  sweep->add_flag("--dry-run", dry_run, "Only print the expansion size");
  sweep->callback([&] {
    ExperimentConfig base = sweep_flags.resolve();
    fairwalk::SweepSpec spec;
    if (full) spec = fairwalk::full_grid();
    if (!spec_path.empty()) {
      std::ifstream in(spec_path);
      if (!in) throw fairwalk::Error("cannot open '" + spec_path + "'");
      spec = fairwalk::sweep_from_json(nlohmann::json::parse(in));
    }
    for (const auto& p : presets) spec.presets.push_back(p);
    if (workers) spec.workers = workers;
    if (cap) spec.cap = cap;
    const auto configs = fairwalk::expand(spec, base);
    std::size_t cw = 0;
    for (const auto& c : configs) cw += c.intervention == fairwalk::Intervention::kCrossWalk;
    std::cout << "crosswalk: " << cw << "\nbaseline: " << configs.size() - cw
              << "\ntotal: " << configs.size() << '\n';
    if (dry_run) return;
    if (table_path.empty()) throw fairwalk::Error("sweep: --table is required");
    auto stats = fairwalk::run_sweep(spec, base, table_path, &std::cerr);
    std::cout << "computed: " << stats.computed << "\nskipped: " << stats.skipped
              << "\nfailed: " << stats.failed << '\n';
  });

  // summarize ----------------------------------------------------------------
  auto* summarize = app.add_subcommand("summarize", "Aggregate a sweep table");
  std::string sum_table, sum_out;
  std::size_t buckets = 5;
  summarize->add_option("--table", sum_table, "Sweep table")->required();
  summarize->add_option("--buckets", buckets, "Relative group-size buckets");
  summarize->add_option("--out", sum_out, "Output JSON (default stdout)");
  summarize->callback([&] {
    write_json(fairwalk::summarize(fairwalk::read_sweep_table(sum_table), buckets), sum_out);
  });

  // gen-sbm ------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-sbm", "Generate a planted-partition attributed graph");
  fairwalk::SbmSpec sbm;
  fairwalk::ControlAttributeSpec control;
  std::string gen_edges, gen_attrs, gen_summary;
  gen->add_option("--blocks", sbm.block_sizes, "Block sizes")->delimiter(',')->required();
  gen->add_option("--p-intra", sbm.p_intra, "Intra-block edge probability");
  gen->add_option("--p-inter", sbm.p_inter, "Inter-block edge probability");
  gen->add_option("--block-attribute", sbm.block_attribute, "Name of the block attribute");
  gen->add_option("--control-probs", control.class_probs, "Control class probabilities")
      ->delimiter(',');
  gen->add_option("--control-bonus", control.intra_bonus, "Same-class edge bonus");
  gen->add_option("--control-attribute", control.name, "Name of the control attribute");
  gen->add_option("--seed", sbm.seed, "Seed");
  gen->add_option("--edges-out", gen_edges, "Edge list output")->required();
  gen->add_option("--attrs-out", gen_attrs, "Attribute table output")->required();
  gen->add_option("--summary-out", gen_summary, "Summary JSON (default stdout)");
  gen->callback([&] {
    if (!control.class_probs.empty()) sbm.control = control;
    auto result = fairwalk::generate_sbm(sbm);
    fairwalk::save_graph(result.graph, gen_edges, gen_attrs);
    write_json(result.summary, gen_summary);
  });

  // bias ---------------------------------------------------------------------
  auto* bias = app.add_subcommand("bias", "CrossWalk reweighting; writes directed weights");
  std::string b_edges, b_attrs, b_sensitive, b_out, b_closeness;
  fairwalk::ReweightConfig rw;
  fairwalk::ClosenessConfig cc;
  std::string b_preset;
  bias->add_option("--edges", b_edges, "Edge list")->required();
  bias->add_option("--attrs", b_attrs, "Attribute table")->required();
  bias->add_option("--sensitive", b_sensitive, "Sensitive attribute")->required();
  bias->add_option("--alpha", rw.alpha, "Boundary crossing share");
  bias->add_option("--beta", rw.beta, "Closeness exponent");
  bias->add_option("--epsilon", rw.epsilon, "Closeness smoothing");
  bias->add_option("--preset", b_preset, "low_awareness | high_awareness");
  bias->add_option("--closeness-walks", cc.walks_per_node, "Walks per node");
  bias->add_option("--closeness-length", cc.walk_length, "Walk length");
  bias->add_option("--seed", cc.seed, "Seed");
  bias->add_option("--threads", cc.threads, "Worker threads (0 = all)");
  bias->add_option("--out", b_out, "Directed weighted edge list")->required();
  bias->add_option("--closeness-out", b_closeness, "Per-node closeness TSV");
  bias->callback([&] {
    if (!b_preset.empty()) {
      const auto p = fairwalk::find_preset(b_preset);
      rw.alpha = p.alpha;
      rw.beta = p.beta;
    }
    const auto graph = fairwalk::load_graph(b_edges, b_attrs);
    const auto part = fairwalk::partition_by(graph, b_sensitive);
    const auto m = fairwalk::estimate_closeness(graph, part, cc);
    const auto biased = fairwalk::reweight(graph, part, m, rw);
    fairwalk::save_weights(graph, biased.out, b_out);
    if (!b_closeness.empty()) {
      std::ofstream out(b_closeness);
      out << "node\tcloseness\n";
      for (fairwalk::NodeId v = 0; v < graph.node_count(); ++v) {
        out << graph.name(v) << '\t' << fairwalk::detail::format_double(m.m[v]) << '\n';
      }
    }
  });

  // walk ---------------------------------------------------------------------
  auto* walk = app.add_subcommand("walk", "Generate node2vec walks");
  std::string w_weights, w_out;
  bool w_directed = false;
  fairwalk::WalkConfig wc;
  walk->add_option("--weights", w_weights, "Edge list (undirected) or bias output")->required();
  walk->add_flag("--directed", w_directed, "Weights file lists directed transitions");
  walk->add_option("--p", wc.p, "Return parameter");
  walk->add_option("--q", wc.q, "In-out parameter");
  walk->add_option("--walks-per-node", wc.walks_per_node, "Walks per node");
  walk->add_option("--walk-length", wc.walk_length, "Steps per walk");
  walk->add_option("--seed", wc.seed, "Seed");
  walk->add_option("--threads", wc.threads, "Worker threads (0 = all)");
  walk->add_option("--out", w_out, "Corpus output, one walk per line")->required();
  walk->callback([&] {
    const auto table = fairwalk::load_weight_table(w_weights, w_directed);
    const auto corpus = fairwalk::generate_walks(table.out, wc);
    fairwalk::save_corpus(corpus, table.names, w_out);
  });

  // embed --------------------------------------------------------------------
  auto* embed = app.add_subcommand("embed", "Train skip-gram embeddings on a walk corpus");
  std::string e_corpus, e_out;
  fairwalk::EmbedConfig ec;
  embed->add_option("--corpus", e_corpus, "Walk corpus")->required();
  embed->add_option("--dim", ec.dim, "Dimension");
  embed->add_option("--window", ec.window, "Context window");
  embed->add_option("--negatives", ec.negatives, "Negative samples per pair");
  embed->add_option("--epochs", ec.epochs, "Epochs");
  embed->add_option("--lr", ec.lr, "Initial learning rate");
  embed->add_option("--seed", ec.seed, "Seed");
  embed->add_flag("--parallel", ec.parallel, "Lock-free multi-threaded training");
  embed->add_option("--threads", ec.threads, "Worker threads (0 = all)");
  embed->add_option("--out", e_out, "Embedding text matrix")->required();
  embed->callback([&] {
    const auto corpus = fairwalk::load_corpus(e_corpus);
    const auto emb = fairwalk::train(corpus.walks, corpus.names.size(), ec);
    fairwalk::save_embeddings(emb, corpus.names, e_out);
    for (std::size_t e = 0; e < emb.epoch_loss.size(); ++e) {
      std::cerr << "epoch " << e + 1 << " mean loss " << emb.epoch_loss[e] << '\n';
    }
  });

  // eval ---------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Cross-validated label propagation and metrics");
  std::string v_emb, v_attrs, v_sensitive, v_control, v_out, v_csv;
  fairwalk::EvalConfig vc;
  eval->add_option("--embeddings", v_emb, "Embedding text matrix")->required();
  eval->add_option("--attrs", v_attrs, "Attribute table")->required();
  eval->add_option("--sensitive", v_sensitive, "Sensitive attribute")->required();
  eval->add_option("--control", v_control, "Control attribute");
  eval->add_option("--folds", vc.folds, "Random stratified splits");
  eval->add_option("--labeled-fraction", vc.labeled_fraction, "Labelled share per split");
  eval->add_option("--knn-k", vc.knn_k, "Propagation graph k");
  eval->add_option("--sigma", vc.sigma, "RBF bandwidth (0 = auto)");
  eval->add_option("--seed", vc.seed, "Seed");
  eval->add_option("--threads", vc.threads, "Worker threads (0 = all)");
  eval->add_option("--out", v_out, "Report JSON (default stdout)");
  eval->callback([&] {
    const auto emb = fairwalk::load_embeddings(v_emb);
    const auto table = fairwalk::load_attribute_table(v_attrs);
    const auto sens =
        fairwalk::make_partition(v_sensitive, table.column(v_sensitive, emb.names));
    std::optional<fairwalk::GroupPartition> ctl;
    if (!v_control.empty()) {
      ctl = fairwalk::make_partition(v_control, table.column(v_control, emb.names));
    }
    auto report = fairwalk::cross_validate(emb.matrix.input, emb.matrix.dim, sens,
                                           ctl ? &*ctl : nullptr, vc);
    report.meta = {{"folds", vc.folds},       {"labeled_fraction", vc.labeled_fraction},
                   {"knn_k", vc.knn_k},       {"sigma", vc.sigma},
                   {"seed", vc.seed},         {"embeddings", v_emb}};
    write_json(fairwalk::to_json(report), v_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
