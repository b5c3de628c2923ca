#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dhgak;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// Two triangles, no node-label file.
fs::path two_triangles(const std::string& name = "TRI") {
  auto dir = oracle::scratch_dir("tu");
  write_file(dir / (name + "_A.txt"),
             "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n5,6\n6,5\n4 ,  6\n6, 4\n");
  write_file(dir / (name + "_graph_indicator.txt"), "1\n1\n1\n2\n2\n2\n");
  write_file(dir / (name + "_graph_labels.txt"), "1\n-1\n\n");
  return dir;
}

}  // namespace

TEST_CASE("triangle graphs without node labels use degrees") {
  const auto dir = two_triangles();
  const auto d = load_tu_dataset(dir, "TRI");
  REQUIRE(d.size() == 2);
  CHECK(d.class_count() == 2);
  for (const auto& g : d.graphs()) {
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
    for (Label l : g.labels()) CHECK(l == 2);
  }
  CHECK(d.label_maps().node_labels_from_degree);
  // first-appearance class remap: 1 -> 0, -1 -> 1
  CHECK(d[0].graph_label() == 0);
  CHECK(d[1].graph_label() == 1);
  fs::remove_all(dir);
}

TEST_CASE("degree labels equal adjacency sizes") {
  auto dir = oracle::scratch_dir("tu");
  write_file(dir / "P_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n2, 4\n4, 2\n5, 6\n6, 5\n");
  write_file(dir / "P_graph_indicator.txt", "1\n1\n1\n1\n2\n2\n");
  write_file(dir / "P_graph_labels.txt", "0\n1\n");
  const auto d = load_tu_dataset(dir, "P");
  for (const auto& g : d.graphs())
    for (NodeId v = 0; v < g.node_count(); ++v) CHECK(g.label(v) == g.degree(v));
  CHECK(d.label_alphabet_size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("node labels are remapped densely in first-appearance order") {
  auto dir = oracle::scratch_dir("tu");
  write_file(dir / "L_A.txt", "1, 2\n2, 1\n3, 4\n4, 3\n");
  write_file(dir / "L_graph_indicator.txt", "1\n1\n2\n2\n");
  write_file(dir / "L_graph_labels.txt", "2\n2\n");
  write_file(dir / "L_node_labels.txt", "7\n3\n7\n11\n");
  const auto d = load_tu_dataset(dir, "L");
  CHECK(d.label_alphabet_size() == 3);
  CHECK(d[0].label(0) == 0);
  CHECK(d[0].label(1) == 1);
  CHECK(d[1].label(0) == 0);
  CHECK(d[1].label(1) == 2);
  CHECK(d.label_maps().node_label_values == std::vector<long long>{7, 3, 11});
  CHECK(d.class_count() == 1);
  fs::remove_all(dir);
}

TEST_CASE("duplicate edges are merged") {
  auto dir = oracle::scratch_dir("tu");
  write_file(dir / "D_A.txt", "1, 2\n2, 1\n1, 2\n2, 1\n");
  write_file(dir / "D_graph_indicator.txt", "1\n1\n");
  write_file(dir / "D_graph_labels.txt", "0\n");
  const auto d = load_tu_dataset(dir, "D");
  CHECK(d[0].edge_count() == 1);
  fs::remove_all(dir);
}

TEST_CASE("malformed TU input is rejected with a location") {
  auto dir = oracle::scratch_dir("tu");
  write_file(dir / "B_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n");
  write_file(dir / "B_graph_labels.txt", "0\n1\n");

  SECTION("missing edge file") {
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("edge to an undeclared node") {
    write_file(dir / "B_A.txt", "1, 2\n5, 7\n");
    try {
      load_tu_dataset(dir, "B");
      FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
      const std::string what = e.what();
      CHECK(what.find("B_A.txt:2") != std::string::npos);
      CHECK(what.find("unknown node 7") != std::string::npos);
    }
  }
  SECTION("missing comma") {
    write_file(dir / "B_A.txt", "1 2\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("self-loop") {
    write_file(dir / "B_A.txt", "1, 1\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("edge across graphs") {
    write_file(dir / "B_A.txt", "3, 4\n4, 3\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("indicator blocks out of order") {
    write_file(dir / "B_A.txt", "1, 2\n2, 1\n");
    write_file(dir / "B_graph_indicator.txt", "1\n2\n1\n2\n2\n2\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("indicator not starting at 1") {
    write_file(dir / "B_A.txt", "1, 2\n2, 1\n");
    write_file(dir / "B_graph_indicator.txt", "0\n0\n1\n1\n1\n1\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("indicator skipping a graph id") {
    write_file(dir / "B_A.txt", "1, 2\n2, 1\n");
    write_file(dir / "B_graph_indicator.txt", "1\n1\n1\n3\n3\n3\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  SECTION("graph label count mismatch") {
    write_file(dir / "B_A.txt", "1, 2\n2, 1\n");
    write_file(dir / "B_graph_labels.txt", "0\n");
    CHECK_THROWS_AS(load_tu_dataset(dir, "B"), DatasetError);
  }
  fs::remove_all(dir);
}

TEST_CASE("TU round trip reproduces the dataset") {
  SECTION("explicit labels") {
    const auto d = oracle::synthetic_dataset(5, 12, 3, 9, "RT");
    auto dir = oracle::scratch_dir("rt");
    write_tu_dataset(d, dir);
    const auto back = load_tu_dataset(dir, "RT");
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(back[i].node_count() == d[i].node_count());
      CHECK(back[i].edge_count() == d[i].edge_count());
      CHECK(back[i].graph_label() == d[i].graph_label());
    }
    write_tu_dataset(back, dir / "again");
    CHECK(load_tu_dataset(dir / "again", "RT") == back);
    fs::remove_all(dir);
  }
  SECTION("degree labels") {
    const auto dir = two_triangles("RD");
    const auto d = load_tu_dataset(dir, "RD");
    write_tu_dataset(d, dir / "out");
    CHECK_FALSE(fs::exists(dir / "out" / "RD_node_labels.txt"));
    CHECK(load_tu_dataset(dir / "out", "RD") == d);
    fs::remove_all(dir);
  }
}

TEST_CASE("graph invariants are enforced") {
  CHECK_THROWS_AS(Graph({{1}, {}}, {0, 0}), std::invalid_argument);      // asymmetric
  CHECK_THROWS_AS(Graph({{0}}, {0}), std::invalid_argument);             // self-loop
  CHECK_THROWS_AS(Graph({{1, 1}, {0, 0}}, {0, 0}), std::invalid_argument);  // duplicate
  CHECK_THROWS_AS(Graph({{1}, {0}}, {0}), std::invalid_argument);        // label count
  CHECK_THROWS_AS(Graph({{1}, {0}}, {0, 0}, -1), std::invalid_argument);  // class
  const Graph g({{2, 1}, {0}, {0}}, {4, 5, 6});
  CHECK(g.neighbors(0)[0] == 1);
  CHECK(g.neighbors(0)[1] == 2);
}

TEST_CASE("dataset invariants are enforced") {
  std::vector<Graph> gs{Graph({{}}, {3}, 0)};
  CHECK_THROWS_AS(Dataset("X", gs, 3, 1), std::invalid_argument);  // label >= alphabet
  CHECK_THROWS_AS(Dataset("X", gs, 4, 0), std::invalid_argument);  // class >= c
  CHECK_THROWS_AS(Dataset("X", {}, 4, 1), std::invalid_argument);
}

TEST_CASE("graph_stats") {
  SECTION("single triangle") {
    const auto d = Dataset::from_graphs("T", {oracle::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0})});
    const auto s = graph_stats(d);
    CHECK(s.graph_count == 1);
    CHECK(s.avg_nodes == 3.0);
    CHECK(s.avg_edges == 3.0);
  }
  SECTION("two graphs of 2 and 4 nodes") {
    const auto d = Dataset::from_graphs(
        "T", {oracle::make_graph(2, {{0, 1}}, {0, 0}), oracle::make_graph(4, {{0, 1}}, {0, 0, 0, 0})});
    CHECK(graph_stats(d).avg_nodes == 3.0);
    CHECK(graph_stats(d).avg_edges == 1.0);
  }
}

TEST_CASE("subset keeps graphs and metadata") {
  const auto d = oracle::synthetic_dataset(3, 10, 4, 6);
  const std::vector<std::size_t> idx{7, 2, 5};
  const auto s = d.subset(idx);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == d[7]);
  CHECK(s[2] == d[5]);
  CHECK(s.label_alphabet_size() == d.label_alphabet_size());
  CHECK(s.node_offsets().back() == d[7].node_count() + d[2].node_count() + d[5].node_count());
}
