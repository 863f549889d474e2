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


#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "fairwalk/graph.hpp"

namespace fairwalk {
namespace {

namespace fs = std::filesystem;

std::string data(const std::string& name) { return std::string(FAIRWALK_TEST_DATA) + "/" + name; }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("fairwalk_graph_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& body = {}) const {
    const auto p = (path_ / name).string();
    if (!body.empty()) std::ofstream(p) << body;
    return p;
  }

 private:
  fs::path path_;
};

double weight_between(const AttributedGraph& g, const std::string& a, const std::string& b) {
  const NodeId u = *g.find(a);
  const NodeId v = *g.find(b);
  for (const auto& nb : g.neighbors(u)) {
    if (nb.node == v) return nb.weight;
  }
  return 0.0;
}

TEST(LoadGraph, Triangle) {
  const auto g = load_graph(data("triangle.edges"), data("triangle.tsv"));
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  for (const auto& e : g.edges()) EXPECT_EQ(e.weight, 1.0);
  EXPECT_EQ(g.attribute("location"), (std::vector<std::string>{"X", "X", "Y"}));
}

TEST(LoadGraph, DuplicateEdgesSum) {
  TempDir tmp;
  const auto g = load_graph(tmp.file("e", "a b\nb a\n"), tmp.file("a", "node\tloc\na\tX\nb\tY\n"));
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(weight_between(g, "a", "b"), 2.0);
  EXPECT_EQ(g.merged_duplicates(), 1u);
}

TEST(LoadGraph, MissingAttributeRowDropsNode) {
  TempDir tmp;
  IngestReport report;
  const auto g = load_graph(tmp.file("e", "a b\nb c\na c\n"),
                            tmp.file("a", "node\tloc\na\tX\nb\tY\n"), &report);
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(report.dropped_missing_attribute, 1u);
}

TEST(LoadGraph, WeightsCommentsAndMissingValues) {
  IngestReport report;
  const auto g = load_graph(data("weighted.edges"), data("weighted.tsv"), &report);
  // n5 has gender NA.
  EXPECT_EQ(g.node_count(), 4u);
  EXPECT_FALSE(g.find("n5"));
  EXPECT_EQ(weight_between(g, "n1", "n2"), 2.0);
  EXPECT_EQ(weight_between(g, "n2", "n3"), 2.25);
  EXPECT_EQ(weight_between(g, "n1", "n4"), 3.0);
  EXPECT_EQ(report.duplicates_merged, 1u);
  EXPECT_EQ(report.dropped_missing_attribute, 1u);
}

TEST(LoadGraph, SelfLoopsDropped) {
  TempDir tmp;
  IngestReport report;
  const auto g = load_graph(tmp.file("e", "a a\na b\n"), tmp.file("a", "node\tl\na\tX\nb\tY\n"),
                            &report);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(report.self_loops_dropped, 1u);
}

TEST(LoadGraph, ParseErrorsCarryLineNumbers) {
  TempDir tmp;
  const auto attrs = tmp.file("a", "node\tl\na\tX\nb\tY\n");
  try {
    load_graph(tmp.file("e1", "a b\n# c\nb\n"), attrs);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    load_graph(tmp.file("e2", "a b\na b -1\n"), attrs);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    load_graph(tmp.file("e3", "a b\n"), tmp.file("a2", "node\tl\na\tX\nb\tY\nzz\tX\n"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("unknown node"), std::string::npos);
  }
}

TEST(LoadGraph, EmptyAfterFilteringIsAnError) {
  TempDir tmp;
  EXPECT_THROW(load_graph(tmp.file("e", "a b\n"), tmp.file("a", "node\tl\na\tX\nb\tNA\n")),
               Error);
}

TEST(LoadGraph, MissingFileIsAnError) {
  EXPECT_THROW(load_graph(data("nope.edges"), data("triangle.tsv")), Error);
}

TEST(BinAge, ThreeBins) {
  EXPECT_EQ(bin_age(17L), "16-18");
  EXPECT_EQ(bin_age(19L), "19-21");
  EXPECT_EQ(bin_age(40L), "22+");
}

TEST(BinAge, Boundaries) {
  EXPECT_EQ(bin_age(16L), "16-18");
  EXPECT_EQ(bin_age(18L), "16-18");
  EXPECT_EQ(bin_age(21L), "19-21");
  EXPECT_EQ(bin_age(22L), "22+");
  EXPECT_FALSE(bin_age(15L));
  EXPECT_FALSE(bin_age(std::string_view("abc")));
  EXPECT_FALSE(bin_age(std::string_view("")));
  EXPECT_EQ(bin_age(std::string_view("19")), "19-21");
}

TEST(BinAge, ExhaustiveAgainstRanges) {
  for (long a = -5; a < 130; ++a) {
    const auto bin = bin_age(a);
    if (a < 16) {
      EXPECT_FALSE(bin) << a;
    } else if (a <= 18) {
      EXPECT_EQ(bin, "16-18") << a;
    } else if (a <= 21) {
      EXPECT_EQ(bin, "19-21") << a;
    } else {
      EXPECT_EQ(bin, "22+") << a;
    }
  }
}

TEST(BinAge, AttributeBinningDropsYoungAndIsolated) {
  TempDir tmp;
  const auto raw = load_graph(tmp.file("e", "a b\nb c\nc d\n"),
                              tmp.file("t", "node\tage\na\t17\nb\t19\nc\t12\nd\t40\n"));
  IngestReport report;
  const auto g = bin_age_attribute(raw, "age", &report);
  // c is dropped, which isolates d.
  EXPECT_EQ(g.names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(g.attribute("age"), (std::vector<std::string>{"16-18", "19-21"}));
  EXPECT_EQ(report.dropped_invalid_age, 1u);
  EXPECT_EQ(report.dropped_isolated, 1u);
}

TEST(PartitionBy, AgesGiveThreeBins) {
  const auto g = bin_age_attribute(load_graph(data("ages.edges"), data("ages.tsv")), "age");
  const auto p = partition_by(g, "age");
  EXPECT_EQ(p.labels, (std::vector<std::string>{"16-18", "19-21", "22+"}));
}

TEST(PartitionBy, CountsInLexicographicOrder) {
  const auto p = make_partition("loc", {"Y", "X", "Z", "X", "Y"});
  EXPECT_EQ(p.labels, (std::vector<std::string>{"X", "Y", "Z"}));
  EXPECT_EQ(p.sizes(), (std::vector<std::size_t>{2, 2, 1}));
  EXPECT_EQ(p.group_of, (std::vector<std::uint32_t>{1, 0, 2, 0, 1}));
}

TEST(PartitionBy, Errors) {
  EXPECT_THROW(make_partition("loc", {"X", "X", "X"}), Error);
  const auto g = load_graph(data("triangle.edges"), data("triangle.tsv"));
  EXPECT_THROW(partition_by(g, "age"), Error);
}

TEST(PartitionBy, SizesSumToNodeCount) {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 40);
    std::vector<std::string> vals;
    for (int i = 0; i < n; ++i) vals.push_back(std::string(1, static_cast<char>('a' + gen() % 5)));
    if (std::set<std::string>(vals.begin(), vals.end()).size() < 2) continue;
    const auto p = make_partition("x", vals);
    std::size_t total = 0;
    for (auto s : p.sizes()) total += s;
    EXPECT_EQ(total, static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) EXPECT_EQ(p.labels[p.group_of[i]], vals[i]);
  }
}

TEST(SelectSubgraph, FullDomainKeepsConnectedGraph) {
  const auto g = load_graph(data("triangle.edges"), data("triangle.tsv"));
  const auto s = select_subgraph(g, "location", {"X", "Y"});
  EXPECT_EQ(s, g);
}

TEST(SelectSubgraph, SingleValue) {
  const auto g = load_graph(data("two_triangles.edges"), data("two_triangles.tsv"));
  const auto s = select_subgraph(g, "location", {"X"});
  EXPECT_EQ(s.names(), (std::vector<std::string>{"x1", "x2", "x3"}));
  EXPECT_EQ(s.edge_count(), 3u);
}

TEST(SelectSubgraph, TieGoesToSmallestId) {
  // Attribute rows list the y-triangle first, so it holds id 0.
  const auto g = load_graph(data("two_triangles.edges"), data("two_triangles.tsv"));
  const auto s = select_subgraph(g, "location", {"X", "Y"});
  EXPECT_EQ(s.names(), (std::vector<std::string>{"y1", "y2", "y3"}));
}

TEST(SelectSubgraph, Errors) {
  const auto g = load_graph(data("two_triangles.edges"), data("two_triangles.tsv"));
  EXPECT_THROW(select_subgraph(g, "location", {}), Error);
  EXPECT_THROW(select_subgraph(g, "location", {"W"}), Error);
  EXPECT_THROW(select_subgraph(g, "color", {"X"}), Error);
}

TEST(SelectSubgraph, ResultIsAllowedAndConnected) {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 40; ++trial) {
    const NodeId n = 10 + gen() % 30;
    std::vector<std::string> names, loc;
    for (NodeId v = 0; v < n; ++v) {
      names.push_back("v" + std::to_string(v));
      loc.push_back(std::string(1, static_cast<char>('A' + gen() % 3)));
    }
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (gen() % 100 < 8) edges.push_back({u, v, 1.0});
      }
    }
    const AttributedGraph g(names, edges, {"loc"}, {loc});
    const std::set<std::string> domain(loc.begin(), loc.end());
    const std::set<std::string> allowed{*domain.begin()};
    const auto s = select_subgraph(g, "loc", allowed);
    for (const auto& value : s.attribute("loc")) EXPECT_TRUE(allowed.count(value));
    const auto comp = connected_components(s);
    for (auto c : comp) EXPECT_EQ(c, 0u);
    // No allowed node outside the result is adjacent to it.
    for (NodeId v = 0; v < s.node_count(); ++v) {
      const NodeId orig = *g.find(s.name(v));
      for (const auto& nb : g.neighbors(orig)) {
        if (allowed.count(loc[nb.node])) {
          EXPECT_TRUE(s.find(g.name(nb.node)));
        }
      }
    }
  }
}

TEST(RoundTrip, FixturesReloadIdentically) {
  TempDir tmp;
  for (const std::string name : {"triangle", "weighted", "ages", "two_triangles"}) {
    const auto g = load_graph(data(name + ".edges"), data(name + ".tsv"));
    const auto e = tmp.file(name + ".out.edges");
    const auto a = tmp.file(name + ".out.tsv");
    save_graph(g, e, a);
    const auto back = load_graph(e, a);
    EXPECT_EQ(back, g) << name;
    save_graph(back, e + "2", a + "2");
    EXPECT_EQ(load_graph(e + "2", a + "2"), g) << name;
  }
}

TEST(RoundTrip, RandomWeightsSurvive) {
  TempDir tmp;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> w(1e-6, 1e3);
  std::vector<std::string> names, loc;
  for (int i = 0; i < 30; ++i) {
    names.push_back("node" + std::to_string(i));
    loc.push_back(i % 2 ? "odd" : "even");
  }
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 30; ++u) edges.push_back({u, (u + 1) % 30, w(gen)});
  const AttributedGraph g(names, edges, {"loc"}, {loc});
  save_graph(g, tmp.file("e"), tmp.file("a"));
  EXPECT_EQ(load_graph(tmp.file("e"), tmp.file("a")), g);
}

TEST(AttributedGraph, RejectsBadInput) {
  EXPECT_THROW(AttributedGraph({"a", "a"}, {}), Error);
  EXPECT_THROW(AttributedGraph({"a", "b"}, {{0, 0, 1.0}}), Error);
  EXPECT_THROW(AttributedGraph({"a", "b"}, {{0, 1, 0.0}}), Error);
  EXPECT_THROW(AttributedGraph({"a", "b"}, {{0, 2, 1.0}}), Error);
  EXPECT_THROW(AttributedGraph({"a", "b"}, {}, {"x"}, {{"1"}}), Error);
}

TEST(AttributedGraph, InducedRedensifies) {
  const AttributedGraph g({"a", "b", "c", "d"}, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}},
                          {"loc"}, {{"p", "q", "r", "s"}});
  const auto h = g.induced({false, true, true, true});
  EXPECT_EQ(h.names(), (std::vector<std::string>{"b", "c", "d"}));
  EXPECT_EQ(h.edges(), (std::vector<Edge>{{0, 1, 2.0}, {1, 2, 3.0}}));
  EXPECT_EQ(h.attribute("loc"), (std::vector<std::string>{"q", "r", "s"}));
}

TEST(GraphSummary, CountsGroups) {
  const auto g = load_graph(data("weighted.edges"), data("weighted.tsv"));
  const auto s = graph_summary(g);
  EXPECT_EQ(s["nodes"], 4);
  EXPECT_EQ(s["groups"]["location"], 3);
  EXPECT_EQ(s["groups"]["gender"], 2);
}

}  // namespace
}  // namespace fairwalk
