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
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fairwalk/common.hpp"
#include "json.hpp"

namespace fairwalk {

struct Neighbor {
  NodeId node;
  double weight;
};

// Per-node neighbour lists, each sorted by node id.
using Adjacency = std::vector<std::vector<Neighbor>>;

struct Edge {
  NodeId u;
  NodeId v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline bool is_neighbor(std::span<const Neighbor> list, NodeId x) {
  auto it = std::lower_bound(list.begin(), list.end(), x,
                             [](const Neighbor& n, NodeId id) { return n.node < id; });
  return it != list.end() && it->node == x;
}

// Undirected weighted graph with dense node ids 0..n-1, an original name per
// node and any number of categorical attributes, each defined on every node.
//
// Construction normalizes edges to u < v, sorts them and merges duplicates by
// summing their weights. Self-loops, out-of-range endpoints and non-positive
// weights are rejected.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  AttributedGraph(std::vector<std::string> names, std::vector<Edge> edges,
                  std::vector<std::string> attribute_names = {},
                  std::vector<std::vector<std::string>> attribute_values = {})
      : names_(std::move(names)),
        attribute_names_(std::move(attribute_names)),
        attribute_values_(std::move(attribute_values)) {
    const std::size_t n = names_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!index_.emplace(names_[i], static_cast<NodeId>(i)).second) {
        throw Error("duplicate node name '" + names_[i] + "'");
      }
    }
    if (attribute_values_.size() != attribute_names_.size()) {
      throw Error("attribute name/value count mismatch");
    }
    for (std::size_t a = 0; a < attribute_names_.size(); ++a) {
      if (attribute_values_[a].size() != n) {
        throw Error("attribute '" + attribute_names_[a] + "' does not cover every node");
      }
      for (std::size_t b = 0; b < a; ++b) {
        if (attribute_names_[a] == attribute_names_[b]) {
          throw Error("duplicate attribute '" + attribute_names_[a] + "'");
        }
      }
    }
    for (Edge& e : edges) {
      if (e.u >= n || e.v >= n) throw Error("edge endpoint out of range");
      if (e.u == e.v) throw Error("self-loop on node '" + names_[e.u] + "'");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw Error("edge weight must be positive and finite");
      }
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (const Edge& e : edges) {
      if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
        edges_.back().weight += e.weight;
        ++merged_duplicates_;
      } else {
        edges_.push_back(e);
      }
    }
    adjacency_.assign(n, {});
    for (const Edge& e : edges_) {
      adjacency_[e.u].push_back({e.v, e.weight});
      adjacency_[e.v].push_back({e.u, e.weight});
    }
    for (auto& list : adjacency_) {
      std::sort(list.begin(), list.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }
  }

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Adjacency& adjacency() const { return adjacency_; }
  std::span<const Neighbor> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  std::size_t merged_duplicates() const { return merged_duplicates_; }

  const std::string& name(NodeId v) const { return names_[v]; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<NodeId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& attribute_names() const { return attribute_names_; }

  bool has_attribute(std::string_view attr) const {
    return std::find(attribute_names_.begin(), attribute_names_.end(), attr) !=
           attribute_names_.end();
  }

  const std::vector<std::string>& attribute(std::string_view attr) const {
    for (std::size_t a = 0; a < attribute_names_.size(); ++a) {
      if (attribute_names_[a] == attr) return attribute_values_[a];
    }
    throw Error("unknown attribute '" + std::string(attr) + "'");
  }

  // Returns a copy with `attr` replaced (or appended when absent).
  AttributedGraph with_attribute(const std::string& attr,
                                 std::vector<std::string> values) const {
    auto attr_names = attribute_names_;
    auto attr_values = attribute_values_;
    auto it = std::find(attr_names.begin(), attr_names.end(), attr);
    if (it == attr_names.end()) {
      attr_names.push_back(attr);
      attr_values.push_back(std::move(values));
    } else {
      attr_values[static_cast<std::size_t>(it - attr_names.begin())] = std::move(values);
    }
    return AttributedGraph(names_, edges_, std::move(attr_names), std::move(attr_values));
  }

  // Induced subgraph on the nodes with keep[v] set. Surviving nodes are
  // re-densified in increasing id order.
  AttributedGraph induced(const std::vector<bool>& keep) const {
    std::vector<NodeId> remap(node_count(), kAbsent);
    std::vector<std::string> names;
    for (NodeId v = 0; v < node_count(); ++v) {
      if (keep[v]) {
        remap[v] = static_cast<NodeId>(names.size());
        names.push_back(names_[v]);
      }
    }
    std::vector<Edge> edges;
    for (const Edge& e : edges_) {
      if (remap[e.u] != kAbsent && remap[e.v] != kAbsent) {
        edges.push_back({remap[e.u], remap[e.v], e.weight});
      }
    }
    std::vector<std::vector<std::string>> values(attribute_names_.size());
    for (std::size_t a = 0; a < attribute_names_.size(); ++a) {
      for (NodeId v = 0; v < node_count(); ++v) {
        if (keep[v]) values[a].push_back(attribute_values_[a][v]);
      }
    }
    return AttributedGraph(std::move(names), std::move(edges), attribute_names_,
                           std::move(values));
  }

  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
    return a.names_ == b.names_ && a.edges_ == b.edges_ &&
           a.attribute_names_ == b.attribute_names_ &&
           a.attribute_values_ == b.attribute_values_;
  }

 private:
  static constexpr NodeId kAbsent = static_cast<NodeId>(-1);

  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Edge> edges_;
  Adjacency adjacency_;
  std::vector<std::string> attribute_names_;
  std::vector<std::vector<std::string>> attribute_values_;
  std::size_t merged_duplicates_ = 0;
};

// Node -> group index for one attribute. Groups are the distinct attribute
// values in lexicographic order.
struct GroupPartition {
  std::string attribute;
  std::vector<std::uint32_t> group_of;
  std::vector<std::string> labels;

  std::size_t group_count() const { return labels.size(); }
  std::size_t node_count() const { return group_of.size(); }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out(labels.size(), 0);
    for (auto g : group_of) ++out[g];
    return out;
  }

  std::uint32_t index_of(std::string_view label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) {
      throw Error("unknown group label '" + std::string(label) + "'");
    }
    return static_cast<std::uint32_t>(it - labels.begin());
  }
};

inline GroupPartition make_partition(const std::string& attr,
                                     const std::vector<std::string>& values) {
  GroupPartition part;
  part.attribute = attr;
  std::set<std::string> distinct(values.begin(), values.end());
  part.labels.assign(distinct.begin(), distinct.end());
  if (part.labels.size() < 2) {
    throw Error("attribute '" + attr + "' has fewer than 2 distinct values");
  }
  part.group_of.reserve(values.size());
  for (const auto& v : values) part.group_of.push_back(part.index_of(v));
  return part;
}

inline GroupPartition partition_by(const AttributedGraph& graph, const std::string& attr) {
  return make_partition(attr, graph.attribute(attr));
}

// ---------------------------------------------------------------------------
// Age binning
// ---------------------------------------------------------------------------

inline std::optional<std::string> bin_age(long years) {
  if (years < 16) return std::nullopt;
  if (years <= 18) return "16-18";
  if (years <= 21) return "19-21";
  return "22+";
}

inline std::optional<std::string> bin_age(std::string_view raw) {
  long years = 0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(first, last, years);
  if (ec != std::errc() || ptr != last || raw.empty()) return std::nullopt;
  return bin_age(years);
}

struct IngestReport {
  std::size_t edge_lines = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_merged = 0;
  std::size_t dropped_missing_attribute = 0;
  std::size_t dropped_invalid_age = 0;
  std::size_t dropped_isolated = 0;
};

namespace detail {

inline std::vector<bool> non_isolated(const AttributedGraph& g) {
  std::vector<bool> keep(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) keep[v] = g.degree(v) > 0;
  return keep;
}

inline std::size_t count_false(const std::vector<bool>& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), false));
}

}  // namespace detail

// Replaces raw ages in `attr` by their bins. Nodes with unparsable ages or
// ages below 16 are dropped with their incident edges, as are nodes left
// without any edge.
inline AttributedGraph bin_age_attribute(const AttributedGraph& graph,
                                         const std::string& attr,
                                         IngestReport* report = nullptr) {
  const auto& raw = graph.attribute(attr);
  std::vector<bool> keep(graph.node_count());
  std::vector<std::string> binned(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    auto bin = bin_age(std::string_view(raw[v]));
    keep[v] = bin.has_value();
    if (bin) binned[v] = *bin;
  }
  AttributedGraph out = graph.with_attribute(attr, std::move(binned)).induced(keep);
  auto connected = detail::non_isolated(out);
  if (report) {
    report->dropped_invalid_age += detail::count_false(keep);
    report->dropped_isolated += detail::count_false(connected);
  }
  out = out.induced(connected);
  if (out.node_count() == 0) throw Error("graph is empty after age binning");
  return out;
}

// ---------------------------------------------------------------------------
// Components and subgraph selection
// ---------------------------------------------------------------------------

// Component id per node, numbered in order of each component's smallest node.
inline std::vector<std::uint32_t> connected_components(const AttributedGraph& g) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(g.node_count(), kUnset);
  std::uint32_t next = 0;
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    queue.push_back(s);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop_front();
      for (const auto& nb : g.neighbors(v)) {
        if (comp[nb.node] == kUnset) {
          comp[nb.node] = next;
          queue.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return comp;
}

// Largest connected component; ties go to the component holding the smallest
// node id.
inline AttributedGraph largest_component(const AttributedGraph& g) {
  auto comp = connected_components(g);
  std::vector<std::size_t> size;
  for (auto c : comp) {
    if (c >= size.size()) size.resize(c + 1, 0);
    ++size[c];
  }
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < size.size(); ++c) {
    if (size[c] > size[best]) best = c;
  }
  std::vector<bool> keep(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) keep[v] = comp[v] == best;
  return g.induced(keep);
}

inline AttributedGraph select_subgraph(const AttributedGraph& graph, const std::string& attr,
                                       const std::set<std::string>& allowed) {
  if (allowed.empty()) throw Error("select_subgraph: no allowed values given");
  const auto& values = graph.attribute(attr);
  std::set<std::string> domain(values.begin(), values.end());
  for (const auto& a : allowed) {
    if (!domain.count(a)) {
      throw Error("select_subgraph: '" + a + "' is not a value of '" + attr + "'");
    }
  }
  std::vector<bool> keep(graph.node_count());
  bool any = false;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    keep[v] = allowed.count(values[v]) > 0;
    any = any || keep[v];
  }
  if (!any) throw Error("select_subgraph: empty result");
  return largest_component(graph.induced(keep));
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

inline bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

inline std::optional<double> parse_double(std::string_view s) {
  // strtod instead of from_chars for GCC 11 compatibility.
  std::string tmp(s);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool is_missing(std::string_view value) {
  return value.empty() || value == "null" || value == "NA";
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

struct RawEdge {
  std::string u;
  std::string v;
  double weight;
};

inline std::vector<RawEdge> read_edge_lines(const std::string& path, IngestReport& report) {
  auto in = open_input(path);
  std::vector<RawEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto fields = split_ws(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(path, lineno, "expected 'u v [weight]'");
    }
    double w = 1.0;
    if (fields.size() == 3) {
      auto parsed = parse_double(fields[2]);
      if (!parsed || !(*parsed > 0.0) || !std::isfinite(*parsed)) {
        throw ParseError(path, lineno, "invalid weight '" + std::string(fields[2]) + "'");
      }
      w = *parsed;
    }
    ++report.edge_lines;
    if (fields[0] == fields[1]) {
      ++report.self_loops_dropped;
      continue;
    }
    edges.push_back({std::string(fields[0]), std::string(fields[1]), w});
  }
  return edges;
}

}  // namespace detail

// Loads an edge list (`u v [weight]`, whitespace separated, `#` comments) and
// a tab-separated attribute table whose header is `node<TAB>attr1<TAB>...`.
//
// Dense ids follow the row order of the attribute table. Nodes with a missing
// value (empty, `null` or `NA`) or without an attribute row are dropped with
// their edges; nodes left without any edge are dropped too.
inline AttributedGraph load_graph(const std::string& edge_path, const std::string& attr_path,
                                  IngestReport* report_out = nullptr) {
  IngestReport report;
  auto raw_edges = detail::read_edge_lines(edge_path, report);

  std::set<std::string> endpoints;
  for (const auto& e : raw_edges) {
    endpoints.insert(e.u);
    endpoints.insert(e.v);
  }

  auto in = detail::open_input(attr_path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    for (auto f : detail::split_tabs(line)) header.emplace_back(f);
  }
  if (header.size() < 2) throw ParseError(attr_path, lineno, "missing attribute header");
  const std::size_t attr_count = header.size() - 1;

  std::vector<std::string> names;
  std::vector<std::vector<std::string>> values(attr_count);
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() > header.size()) {
      throw ParseError(attr_path, lineno, "too many fields");
    }
    std::string node(fields[0]);
    if (node.empty()) throw ParseError(attr_path, lineno, "empty node id");
    if (!seen.insert(node).second) {
      throw ParseError(attr_path, lineno, "duplicate node '" + node + "'");
    }
    if (!endpoints.count(node)) {
      throw ParseError(attr_path, lineno, "unknown node '" + node + "'");
    }
    bool complete = fields.size() == header.size();
    for (std::size_t a = 1; complete && a < fields.size(); ++a) {
      complete = !detail::is_missing(fields[a]);
    }
    if (!complete) continue;
    names.push_back(node);
    for (std::size_t a = 0; a < attr_count; ++a) values[a].emplace_back(fields[a + 1]);
  }
  report.dropped_missing_attribute = endpoints.size() - names.size();

  std::unordered_map<std::string, NodeId> ids;
  for (std::size_t i = 0; i < names.size(); ++i) ids.emplace(names[i], static_cast<NodeId>(i));
  std::vector<Edge> edges;
  for (const auto& e : raw_edges) {
    auto a = ids.find(e.u);
    auto b = ids.find(e.v);
    if (a != ids.end() && b != ids.end()) edges.push_back({a->second, b->second, e.weight});
  }

  AttributedGraph graph(std::move(names), std::move(edges),
                        std::vector<std::string>(header.begin() + 1, header.end()),
                        std::move(values));
  report.duplicates_merged = graph.merged_duplicates();
  auto connected = detail::non_isolated(graph);
  report.dropped_isolated = detail::count_false(connected);
  if (report.dropped_isolated > 0) graph = graph.induced(connected);
  if (graph.node_count() == 0) throw Error("graph is empty after filtering");
  if (report_out) *report_out = report;
  return graph;
}

// Raw attribute table: header names and one row of values per node name.
struct AttributeTable {
  std::vector<std::string> attributes;
  std::unordered_map<std::string, std::vector<std::string>> rows;

  // Values of `attr` for `names`, in that order.
  std::vector<std::string> column(const std::string& attr,
                                  const std::vector<std::string>& names) const {
    auto it = std::find(attributes.begin(), attributes.end(), attr);
    if (it == attributes.end()) throw Error("unknown attribute '" + attr + "'");
    const auto col = static_cast<std::size_t>(it - attributes.begin());
    std::vector<std::string> out;
    out.reserve(names.size());
    for (const auto& n : names) {
      auto row = rows.find(n);
      if (row == rows.end() || col >= row->second.size() ||
          detail::is_missing(row->second[col])) {
        throw Error("node '" + n + "' has no value for '" + attr + "'");
      }
      out.push_back(row->second[col]);
    }
    return out;
  }
};

inline AttributeTable load_attribute_table(const std::string& path) {
  auto in = detail::open_input(path);
  AttributeTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    auto fields = detail::split_tabs(line);
    if (!have_header) {
      if (fields.size() < 2) throw ParseError(path, lineno, "missing attribute header");
      table.attributes.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() > table.attributes.size() + 1) {
      throw ParseError(path, lineno, "too many fields");
    }
    std::vector<std::string> values(fields.begin() + 1, fields.end());
    if (!table.rows.emplace(std::string(fields[0]), std::move(values)).second) {
      throw ParseError(path, lineno, "duplicate node '" + std::string(fields[0]) + "'");
    }
  }
  if (!have_header) throw ParseError(path, lineno, "missing attribute header");
  return table;
}

inline void save_graph(const AttributedGraph& g, const std::string& edge_path,
                       const std::string& attr_path) {
  {
    auto out = detail::open_output(edge_path);
    for (const Edge& e : g.edges()) {
      out << g.name(e.u) << '\t' << g.name(e.v) << '\t' << detail::format_double(e.weight)
          << '\n';
    }
    if (!out) throw Error("write failed for '" + edge_path + "'");
  }
  auto out = detail::open_output(attr_path);
  out << "node";
  for (const auto& a : g.attribute_names()) out << '\t' << a;
  out << '\n';
  std::vector<const std::vector<std::string>*> cols;
  for (const auto& a : g.attribute_names()) cols.push_back(&g.attribute(a));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << g.name(v);
    for (const auto* col : cols) out << '\t' << (*col)[v];
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + attr_path + "'");
}

// {nodes, edges, groups: {attribute: distinct value count}}
inline nlohmann::json graph_summary(const AttributedGraph& g) {
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& a : g.attribute_names()) {
    const auto& vals = g.attribute(a);
    groups[a] = std::set<std::string>(vals.begin(), vals.end()).size();
  }
  return {{"nodes", g.node_count()}, {"edges", g.edge_count()}, {"groups", groups}};
}

}  // namespace fairwalk
