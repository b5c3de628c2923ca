#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"

using namespace dhgak;

namespace {

std::vector<Label> encode(const Graph& g, NodeId v, std::size_t h, std::size_t b) {
  return encode_slice(g, eigenvector_centrality(g), v, h, b).labels;
}

std::size_t length_law(const Graph& g, NodeId v, std::size_t h, std::size_t b) {
  std::size_t n = 0;
  for (NodeId u : bfs_leaves(g, v, h))
    for (std::size_t i = 0; i <= b; ++i) n += bfs_leaves(g, u, i).size();
  return n;
}

}  // namespace

TEST_CASE("bfs_leaves returns exactly-distance sets") {
  const auto path = oracle::make_graph(3, {{0, 1}, {1, 2}}, {0, 0, 0});
  CHECK(bfs_leaves(path, 0, 2) == std::vector<NodeId>{2});
  CHECK(bfs_leaves(path, 0, 3).empty());
  const auto tri = oracle::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0});
  auto ring = bfs_leaves(tri, 0, 1);
  std::sort(ring.begin(), ring.end());
  CHECK(ring == std::vector<NodeId>{1, 2});
  for (NodeId v = 0; v < 3; ++v) CHECK(bfs_leaves(tri, v, 0) == std::vector<NodeId>{v});
}

TEST_CASE("bfs_leaves agrees with all-pairs distances") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 40; ++t) {
    const auto g = oracle::random_graph(rng, 1 + rng() % 12, 0.2, 2, false);
    const auto d = oracle::distances(g);
    for (NodeId v = 0; v < g.node_count(); ++v)
      for (std::size_t r = 0; r <= 5; ++r) {
        auto got = bfs_leaves(g, v, r);
        std::sort(got.begin(), got.end());
        std::vector<NodeId> want;
        for (NodeId w = 0; w < g.node_count(); ++w)
          if (d[v][w] == r) want.push_back(w);
        CHECK(got == want);
      }
  }
}

TEST_CASE("zero-width zero-hop slice is the node label") {
  std::mt19937_64 rng(2);
  const auto g = oracle::random_graph(rng, 10, 0.3, 5, false);
  for (NodeId v = 0; v < 10; ++v) CHECK(encode(g, v, 0, 0) == std::vector<Label>{g.label(v)});
}

TEST_CASE("path 0-1-2 with labels [5,6,7]") {
  const auto g = oracle::make_graph(3, {{0, 1}, {1, 2}}, {5, 6, 7});
  CHECK(encode(g, 1, 1, 1) == std::vector<Label>{5, 6, 7, 6});
}

TEST_CASE("triangle hop-1 encodings have length 2") {
  const auto d = Dataset::from_graphs("T", {oracle::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 1, 2})});
  const auto table = encode_dataset(d, {0, 1});
  for (std::size_t r = 0; r < 3; ++r) CHECK(table.tokens(1, r).size() == 2);
}

// Graph of the worked slice example: v1 joined to v2, v3, v4; v4 the hub
// that also reaches v3's side through v5. Node i is stored at index i-1 with
// label i.
TEST_CASE("worked example: hop-1 slices of v1") {
  const auto g = oracle::make_graph(
      10, {{0, 1}, {0, 2}, {0, 3}, {3, 8}, {3, 9}, {3, 4}, {1, 7}, {1, 6}, {2, 4}, {2, 5}},
      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const auto rank = eigenvector_centrality(g);
  REQUIRE(rank.score(3) > rank.score(2));
  REQUIRE(rank.score(2) > rank.score(1));

  CHECK(encode_slice(g, rank, 0, 1, 0).labels == std::vector<Label>{4, 3, 2});

  // S_1^1(v1): each frontier node followed by its neighbours, v1 repeated.
  const auto s = encode_slice(g, rank, 0, 1, 1).labels;
  REQUIRE(s.size() == 3 + 4 + 3 + 3);
  auto block = [&](std::size_t from, std::size_t len) {
    std::vector<Label> b(s.begin() + static_cast<std::ptrdiff_t>(from),
                         s.begin() + static_cast<std::ptrdiff_t>(from + len));
    std::sort(b.begin(), b.end());
    return b;
  };
  CHECK(s[0] == 4);
  CHECK(block(1, 4) == std::vector<Label>{1, 5, 9, 10});
  CHECK(s[5] == 3);
  CHECK(block(6, 3) == std::vector<Label>{1, 5, 6});
  CHECK(s[9] == 2);
  CHECK(block(10, 3) == std::vector<Label>{1, 7, 8});
  CHECK(std::count(s.begin(), s.end(), 1u) == 3);
}

TEST_CASE("encode_slice matches the brute-force algorithm and the length law") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const auto g = oracle::random_graph(rng, n, 0.1 + 0.05 * (t % 6), 1 + rng() % 4, t % 3 != 0);
    const auto rank = eigenvector_centrality(g);
    for (NodeId v = 0; v < n; ++v)
      for (std::size_t h = 0; h <= 3; ++h)
        for (std::size_t b = 0; b <= 2; ++b) {
          const auto got = encode_slice(g, rank, v, h, b).labels;
          CHECK(got == oracle::brute_force_slice(g, rank.scores(), v, h, b));
          CHECK(got.size() == length_law(g, v, h, b));
        }
  }
}

TEST_CASE("encode_dataset agrees with encode_slice row by row") {
  const auto d = oracle::synthetic_dataset(4, 6, 3, 10);
  for (std::size_t b = 0; b <= 2; ++b) {
    const auto table = encode_dataset(d, {b, 4});
    REQUIRE(table.rows() == d.total_nodes());
    REQUIRE(table.hop_count() == 5);
    for (std::size_t g = 0; g < d.size(); ++g) {
      const auto rank = eigenvector_centrality(d[g]);
      for (NodeId v = 0; v < d[g].node_count(); ++v)
        for (std::size_t h = 0; h <= 4; ++h) {
          const auto t = table.tokens(h, d.node_offset(g) + v);
          CHECK(std::vector<Label>(t.begin(), t.end()) == encode_slice(d[g], rank, v, h, b).labels);
        }
    }
  }
}

TEST_CASE("H=0, b=0 gives singleton encodings") {
  const auto d = oracle::synthetic_dataset(8, 4, 2, 6);
  const auto table = encode_dataset(d, {0, 0});
  std::size_t row = 0;
  for (const auto& g : d.graphs())
    for (NodeId v = 0; v < g.node_count(); ++v, ++row) {
      const auto t = table.tokens(0, row);
      REQUIRE(t.size() == 1);
      CHECK(t[0] == g.label(v));
    }
}

TEST_CASE("isomorphic graphs give identical encoding multisets") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 10;
    const auto g = oracle::random_graph(rng, n, 0.3, 3, true);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<NodeId>> adj(n);
    std::vector<Label> labels(n);
    for (NodeId v = 0; v < n; ++v) {
      labels[perm[v]] = g.label(v);
      for (NodeId u : g.neighbors(v)) adj[perm[v]].push_back(perm[u]);
    }
    const Graph h(std::move(adj), std::move(labels));
    const auto d = Dataset::from_graphs("I", {g, h});
    const auto table = encode_dataset(d, {1, 3});
    for (std::size_t hop = 0; hop <= 3; ++hop) {
      std::vector<std::vector<Label>> a, b;
      for (NodeId v = 0; v < n; ++v) {
        const auto x = table.tokens(hop, v), y = table.tokens(hop, n + v);
        a.emplace_back(x.begin(), x.end());
        b.emplace_back(y.begin(), y.end());
      }
      // as multisets of token multisets: ties may reorder tokens inside a slice
      for (auto* side : {&a, &b}) {
        for (auto& s : *side) std::sort(s.begin(), s.end());
        std::sort(side->begin(), side->end());
      }
      CHECK(a == b);
    }
  }
}

TEST_CASE("storage order is irrelevant when scores and labels are distinct") {
  // path 0-1-2-3 plus pendant 4 on node 1: asymmetric, distinct labels
  const auto g = oracle::make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {1, 4}}, {0, 1, 2, 3, 4});
  const std::vector<NodeId> perm{3, 0, 4, 1, 2};
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 0; v < 5; ++v)
    for (NodeId u : g.neighbors(v))
      if (v < u) edges.emplace_back(perm[v], perm[u]);
  std::vector<Label> labels(5);
  for (NodeId v = 0; v < 5; ++v) labels[perm[v]] = g.label(v);
  const auto h = oracle::make_graph(5, edges, labels);
  for (NodeId v = 0; v < 5; ++v)
    for (std::size_t hop = 0; hop <= 3; ++hop)
      for (std::size_t b = 0; b <= 2; ++b) CHECK(encode(g, v, hop, b) == encode(h, perm[v], hop, b));
}

TEST_CASE("hops beyond the eccentricity give empty encodings") {
  const auto g = oracle::make_graph(3, {{0, 1}, {1, 2}}, {0, 1, 2});
  CHECK(encode(g, 1, 2, 1).empty());
  const auto d = Dataset::from_graphs("P", {g});
  const auto table = encode_dataset(d, {1, 3});
  CHECK(table.tokens(3, 0).empty());
  // sentences skip empty encodings
  for (auto s : table.sentences(3)) CHECK_FALSE(s.empty());
}
