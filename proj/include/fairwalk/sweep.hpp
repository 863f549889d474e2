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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fairwalk/config.hpp"
#include "fairwalk/csv.hpp"
#include "fairwalk/pipeline.hpp"
#include "json.hpp"

namespace fairwalk {

// Value lists per swept parameter. An empty list keeps the base config's
// value. Named presets add their (alpha, beta) pair to the CrossWalk grid.
struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> ps;
  std::vector<double> qs;
  std::vector<std::string> presets;
  bool include_baseline = true;
  std::size_t cap = 10000;
  unsigned workers = 1;

  bool empty() const {
    return alphas.empty() && betas.empty() && ps.empty() && qs.empty() && presets.empty();
  }
};

inline SweepSpec full_grid() {
  SweepSpec s;
  s.ps = {0.1, 0.5, 1.0, 5.0, 10.0};
  s.qs = {0.1, 0.5, 1.0, 5.0, 10.0};
  s.alphas = {0.01, 0.25, 0.5, 0.75, 0.99};
  s.betas = {1, 2, 3, 5, 8, 11, 15};
  return s;
}

inline SweepSpec sweep_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"alpha",   "beta", "p",   "q",
                                           "presets", "baseline", "cap", "workers"};
  if (!j.is_object()) throw Error("sweep spec: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error("sweep spec: unknown key '" + key + "'");
  }
  SweepSpec s;
  try {
    if (j.contains("alpha")) j.at("alpha").get_to(s.alphas);
    if (j.contains("beta")) j.at("beta").get_to(s.betas);
    if (j.contains("p")) j.at("p").get_to(s.ps);
    if (j.contains("q")) j.at("q").get_to(s.qs);
    if (j.contains("presets")) j.at("presets").get_to(s.presets);
    if (j.contains("baseline")) j.at("baseline").get_to(s.include_baseline);
    if (j.contains("cap")) j.at("cap").get_to(s.cap);
    if (j.contains("workers")) j.at("workers").get_to(s.workers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("sweep spec: ") + e.what());
  }
  return s;
}

inline nlohmann::json to_json(const SweepSpec& s) {
  return {{"alpha", s.alphas},     {"beta", s.betas},
          {"p", s.ps},             {"q", s.qs},
          {"presets", s.presets},  {"baseline", s.include_baseline},
          {"cap", s.cap},          {"workers", s.workers}};
}

// Cartesian expansion. CrossWalk rows cover (alpha, beta) x (p, q); baseline
// rows cover (p, q) and are added when include_baseline is set or when there
// is no CrossWalk grid at all. An empty spec yields the base config alone.
inline std::vector<ExperimentConfig> expand(const SweepSpec& spec,
                                            const ExperimentConfig& base) {
  if (spec.empty()) return {base};
  auto or_base = [](const std::vector<double>& xs, double fallback) {
    return xs.empty() ? std::vector<double>{fallback} : xs;
  };
  std::vector<std::pair<double, double>> ab;
  if (!spec.alphas.empty() || !spec.betas.empty()) {
    for (double a : or_base(spec.alphas, base.alpha)) {
      for (double b : or_base(spec.betas, base.beta)) ab.emplace_back(a, b);
    }
  }
  for (const auto& name : spec.presets) {
    const Preset p = find_preset(name);
    ab.emplace_back(p.alpha, p.beta);
  }
  if (ab.empty() && base.intervention == Intervention::kCrossWalk) {
    ab.emplace_back(base.alpha, base.beta);
  }
  const bool baseline = spec.include_baseline || ab.empty();

  std::vector<ExperimentConfig> out;
  std::set<std::string> keys;
  auto add = [&](ExperimentConfig c) {
    if (keys.insert(run_key(c)).second) out.push_back(std::move(c));
  };
  const auto ps = or_base(spec.ps, base.p);
  const auto qs = or_base(spec.qs, base.q);
  for (const auto& [a, b] : ab) {
    for (double p : ps) {
      for (double q : qs) {
        ExperimentConfig c = base;
        c.intervention = Intervention::kCrossWalk;
        c.alpha = a;
        c.beta = b;
        c.p = p;
        c.q = q;
        add(std::move(c));
      }
    }
  }
  if (baseline) {
    for (double p : ps) {
      for (double q : qs) {
        ExperimentConfig c = base;
        c.intervention = Intervention::kBaseline;
        c.p = p;
        c.q = q;
        add(std::move(c));
      }
    }
  }
  return out;
}

// Parsed sweep table; one map per data row, keyed by column name.
using SweepTable = std::vector<std::map<std::string, std::string>>;

inline SweepTable read_sweep_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open sweep table '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto rows = csv::parse(buf.str());
  if (rows.empty()) throw Error("sweep table '" + path + "' has no header");
  if (rows[0] != csv_columns()) {
    throw Error("sweep table '" + path + "' does not match schema version " +
                std::to_string(kCsvSchemaVersion));
  }
  SweepTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw Error("sweep table '" + path + "': row " + std::to_string(r) +
                  " has the wrong number of fields");
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < rows[0].size(); ++i) row[rows[0][i]] = rows[r][i];
    table.push_back(std::move(row));
  }
  return table;
}

struct SweepStats {
  std::size_t planned = 0;
  std::size_t skipped = 0;  // already present with status ok
  std::size_t computed = 0;
  std::size_t failed = 0;
};

// Runs every expanded configuration whose key has no `ok` row in the table
// yet, appending one row per run. Individual failures are recorded as rows
// with status `error` and do not stop the sweep.
inline SweepStats run_sweep(const SweepSpec& spec, const ExperimentConfig& base,
                            const std::string& table_path, std::ostream* log = nullptr) {
  const auto configs = expand(spec, base);
  if (configs.size() > spec.cap) {
    throw Error("sweep expands to " + std::to_string(configs.size()) +
                " runs, above the cap of " + std::to_string(spec.cap));
  }
  SweepStats stats;
  stats.planned = configs.size();
  if (log) *log << "sweep: " << configs.size() << " configurations\n";

  std::set<std::string> done;
  const bool exists = std::filesystem::exists(table_path);
  if (exists) {
    for (const auto& row : read_sweep_table(table_path)) {
      if (row.at("status") == "ok") done.insert(row.at("key"));
    }
  }
  std::vector<const ExperimentConfig*> pending;
  for (const auto& c : configs) {
    if (done.count(run_key(c))) {
      ++stats.skipped;
    } else {
      pending.push_back(&c);
    }
  }

  std::ofstream out(table_path, std::ios::app);
  if (!out) throw Error("cannot write sweep table '" + table_path + "'");
  if (!exists) out << csv::join_row(csv_columns()) << '\n' << std::flush;

  StageCache cache;
  std::mutex mu;
  parallel_for(pending.size(), std::max(1u, spec.workers), [&](std::size_t i) {
    ExperimentConfig c = *pending[i];
    c.output_dir.clear();
    std::vector<std::string> row;
    bool ok = true;
    try {
      const auto result = run_experiment(c, &cache);
      row = csv_row(c, &result.report);
    } catch (const std::exception& e) {
      row = csv_row(c, nullptr, e.what());
      ok = false;
    }
    std::lock_guard lock(mu);
    out << csv::join_row(row) << '\n' << std::flush;
    ok ? ++stats.computed : ++stats.failed;
    if (log) {
      *log << "[" << (stats.computed + stats.failed) << "/" << pending.size() << "] "
           << run_key(c) << (ok ? "" : " FAILED") << '\n';
    }
  });
  return stats;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

namespace detail {

struct Range {
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;

  void add(double x) {
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  nlohmann::json to_json() const {
    if (!n) return nullptr;
    return {{"mean", mean()}, {"min", lo}, {"max", hi}};
  }
};

inline std::vector<double> parse_numbers(const std::string& cell) {
  std::vector<double> out;
  for (const auto& s : csv::split_list(cell)) {
    auto x = parse_double(s);
    if (!x) throw Error("sweep table: bad number '" + s + "'");
    out.push_back(*x);
  }
  return out;
}

inline std::string config_label(const std::map<std::string, std::string>& row) {
  if (row.at("intervention") == "baseline") return "baseline";
  auto norm = [&](const char* col) {
    auto x = parse_double(row.at(col));
    if (!x) throw Error(std::string("sweep table: bad ") + col + " '" + row.at(col) + "'");
    return num(*x);
  };
  return "alpha=" + norm("alpha") + ",beta=" + norm("beta");
}

constexpr const char* kMetrics[] = {"awareness", "disparity", "performance"};

struct ConfigStats {
  std::map<std::string, Range> metric;
  std::vector<Range> bucket_q;
  std::vector<Range> bucket_q_star;
  std::size_t runs = 0;
};

// Per-config statistics for one set of rows.
inline std::map<std::string, ConfigStats> config_stats(
    const std::vector<const std::map<std::string, std::string>*>& rows, std::size_t buckets) {
  std::map<std::string, ConfigStats> out;
  for (const auto* row : rows) {
    auto& st = out[config_label(*row)];
    st.bucket_q.resize(buckets);
    st.bucket_q_star.resize(buckets);
    ++st.runs;
    for (const char* m : kMetrics) {
      const auto& cell = row->at(m);
      if (!cell.empty()) st.metric[m].add(*parse_double(cell));
    }
    const auto sizes = parse_numbers(row->at("group_sizes"));
    const auto q = parse_numbers(row->at("q_per_group"));
    const auto q_star = parse_numbers(row->at("q_star_per_group"));
    double total = 0.0;
    for (double s : sizes) total += s;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      auto b = static_cast<std::size_t>(sizes[g] / total * static_cast<double>(buckets));
      b = std::min(b, buckets - 1);
      if (g < q.size()) st.bucket_q[b].add(q[g]);
      if (g < q_star.size()) st.bucket_q_star[b].add(q_star[g]);
    }
  }
  return out;
}

inline nlohmann::json view_json(const std::map<std::string, ConfigStats>& stats,
                                std::size_t buckets) {
  nlohmann::json configs = nlohmann::json::object();
  nlohmann::json bucket_json = nlohmann::json::object();
  for (const auto& [label, st] : stats) {
    nlohmann::json c = {{"runs", st.runs}};
    for (const char* m : kMetrics) {
      auto it = st.metric.find(m);
      c[m] = it == st.metric.end() ? nlohmann::json(nullptr) : it->second.to_json();
    }
    configs[label] = c;
    nlohmann::json bl = nlohmann::json::array();
    for (std::size_t b = 0; b < buckets; ++b) {
      bl.push_back({{"relative_size_min", static_cast<double>(b) / static_cast<double>(buckets)},
                    {"relative_size_max",
                     static_cast<double>(b + 1) / static_cast<double>(buckets)},
                    {"groups", st.bucket_q[b].n},
                    {"mean_q", st.bucket_q[b].n ? nlohmann::json(st.bucket_q[b].mean())
                                                : nlohmann::json(nullptr)},
                    {"mean_q_star", st.bucket_q_star[b].n
                                        ? nlohmann::json(st.bucket_q_star[b].mean())
                                        : nlohmann::json(nullptr)}});
    }
    bucket_json[label] = bl;
  }

  nlohmann::json presets = nlohmann::json::object();
  auto base = stats.find("baseline");
  for (const Preset& p : {kLowAwareness, kHighAwareness}) {
    const std::string label = "alpha=" + num(p.alpha) + ",beta=" + num(p.beta);
    auto it = stats.find(label);
    if (it == stats.end()) continue;
    nlohmann::json pj = {{"alpha", p.alpha}, {"beta", p.beta}};
    for (const char* m : kMetrics) {
      auto mi = it->second.metric.find(m);
      if (mi == it->second.metric.end()) continue;
      pj[m] = mi->second.mean();
      if (base != stats.end()) {
        auto bi = base->second.metric.find(m);
        if (bi != base->second.metric.end()) {
          pj[std::string("baseline_") + m] = bi->second.mean();
          pj[std::string("delta_") + m] = mi->second.mean() - bi->second.mean();
        }
      }
    }
    presets[p.name] = pj;
  }
  return {{"configs", configs}, {"presets", presets}, {"group_size_buckets", bucket_json}};
}

}  // namespace detail

// Aggregates `ok` rows: per (alpha, beta) mean/min/max of every metric across
// the (p, q) grid, preset-vs-baseline deltas, and mean per-group F1 by
// relative group size bucket. Reported per dataset and as the mean over
// per-dataset means.
inline nlohmann::json summarize(const SweepTable& table, std::size_t buckets = 5) {
  if (buckets < 1) throw Error("summarize: need at least one bucket");
  std::map<std::string, std::vector<const std::map<std::string, std::string>*>> by_dataset;
  std::size_t used = 0;
  for (const auto& row : table) {
    if (row.at("status") != "ok") continue;
    by_dataset[row.at("dataset")].push_back(&row);
    ++used;
  }
  if (used == 0) throw Error("summarize: table has no successful rows");

  nlohmann::json per_dataset = nlohmann::json::object();
  std::map<std::string, std::map<std::string, detail::Range>> across;  // label -> metric
  for (const auto& [name, rows] : by_dataset) {
    const auto stats = detail::config_stats(rows, buckets);
    per_dataset[name] = detail::view_json(stats, buckets);
    for (const auto& [label, st] : stats) {
      for (const auto& [metric, range] : st.metric) across[label][metric].add(range.mean());
    }
  }
  nlohmann::json mean_view = nlohmann::json::object();
  for (const auto& [label, metrics] : across) {
    nlohmann::json c;
    for (const auto& [metric, range] : metrics) c[metric] = range.to_json();
    mean_view[label] = c;
  }
  return {{"rows", used},
          {"buckets", buckets},
          {"by_dataset", per_dataset},
          {"mean_over_datasets", mean_view}};
}

}  // namespace fairwalk
