#include <catch_amalgamated.hpp>

#include <numeric>

#include "oracles.hpp"

using namespace dhgak;
using Catch::Approx;

TEST_CASE("triangle has uniform centrality") {
  const auto g = oracle::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0});
  const auto r = eigenvector_centrality(g);
  CHECK(r.converged());
  for (double s : r.scores()) CHECK(std::abs(s - 1.0 / std::sqrt(3.0)) < 1e-9);
}

TEST_CASE("star K_{1,4} has center/leaf ratio 2") {
  const auto g = oracle::make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {0, 0, 0, 0, 0});
  const auto r = eigenvector_centrality(g);
  CHECK(r.converged());
  CHECK(std::abs(r.score(0) / r.score(1) - 2.0) < 1e-6);
  const auto dense = oracle::dense_centrality(g);
  CHECK(std::abs(dense[0] / dense[1] - 2.0) < 1e-12);
  for (NodeId v = 0; v < 5; ++v) CHECK(std::abs(r.score(v) - dense[v]) < 1e-6);
}

TEST_CASE("single isolated node has score 1") {
  const auto r = eigenvector_centrality(Graph({{}}, {0}));
  REQUIRE(r.size() == 1);
  CHECK(r.score(0) == Approx(1.0).margin(1e-12));
}

TEST_CASE("scores are a unit non-negative vector") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_graph(rng, 2 + rng() % 19, 0.2, 3, t % 2 == 0);
    const auto r = eigenvector_centrality(g);
    double norm = 0.0;
    for (double s : r.scores()) {
      CHECK(s >= 0.0);
      norm += s * s;
    }
    CHECK(norm == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("power iteration matches the dense eigenvector on connected graphs") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 19;
    const auto g = oracle::random_graph(rng, n, 0.15 + 0.1 * (t % 4), 4, true);
    const auto dense = oracle::dense_centrality(g);
    const auto r = eigenvector_centrality(g, {10000, 1e-13});
    INFO("n=" << n << " trial " << t);
    REQUIRE(r.converged());
    for (NodeId v = 0; v < n; ++v) CHECK(std::abs(r.score(v) - dense[v]) < 1e-6);
  }
}

TEST_CASE("vertex-transitive graphs have equal scores") {
  for (std::size_t n : {3u, 4u, 5u, 8u, 11u}) {
    std::vector<std::pair<NodeId, NodeId>> cycle, complete;
    for (NodeId v = 0; v < n; ++v) {
      cycle.emplace_back(v, static_cast<NodeId>((v + 1) % n));
      for (NodeId u = v + 1; u < n; ++u) complete.emplace_back(v, u);
    }
    for (const auto& edges : {cycle, complete}) {
      const auto r = eigenvector_centrality(oracle::make_graph(n, edges, std::vector<Label>(n, 0)));
      for (double s : r.scores()) CHECK(std::abs(s - r.score(0)) < 1e-9);
    }
  }
}

TEST_CASE("bipartite graphs converge thanks to the shift") {
  // even cycles and paths oscillate under plain power iteration on A
  const auto path = oracle::make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {0, 0, 0, 0});
  const auto r = eigenvector_centrality(path);
  CHECK(r.converged());
  CHECK(r.score(1) > r.score(0));
}

TEST_CASE("non-convergence is reported, not thrown") {
  std::mt19937_64 rng(3);
  const auto g = oracle::random_graph(rng, 15, 0.2, 2, true);
  const auto r = eigenvector_centrality(g, {1, 1e-15});
  CHECK_FALSE(r.converged());
  CHECK(r.iterations() == 1);
  CHECK(r.size() == 15);
}

TEST_CASE("sort_by_centrality tie-breaks by label then index") {
  SECTION("triangle with labels [2,1,1]") {
    const auto g = oracle::make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {2, 1, 1});
    const auto r = eigenvector_centrality(g);
    CHECK(sort_by_centrality({0, 1, 2}, r) == std::vector<NodeId>{1, 2, 0});
  }
  SECTION("path center first") {
    const auto g = oracle::make_graph(3, {{0, 1}, {1, 2}}, {0, 0, 0});
    const auto r = eigenvector_centrality(g);
    CHECK(sort_by_centrality({0, 1, 2}, r).front() == 1);
  }
  SECTION("empty list") {
    const auto g = oracle::make_graph(3, {{0, 1}, {1, 2}}, {0, 0, 0});
    CHECK(sort_by_centrality({}, eigenvector_centrality(g)).empty());
  }
}

TEST_CASE("order key is a strict total order and sorting is a permutation") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng() % 15;
    const auto g = oracle::random_graph(rng, n, 0.25, 2, false);
    const auto r = eigenvector_centrality(g);
    std::vector<NodeId> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const auto sorted = sort_by_centrality(nodes, r);
    CHECK(std::is_permutation(sorted.begin(), sorted.end(), nodes.begin()));
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      CHECK(r.before(sorted[i], sorted[i + 1]));
      CHECK_FALSE(r.before(sorted[i + 1], sorted[i]));
    }
    CHECK(sort_by_centrality(nodes, r) == sorted);
  }
}
