#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "graph.hpp"

namespace dhgak {

struct CentralityOptions {
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

/// Eigenvector centrality of one graph plus the total node order used by the
/// slice encoder: score descending, then label ascending, then index ascending.
///
/// Scores are compared on a 1e-9 grid so that automorphic nodes, whose
/// iterates differ only by summation round-off, fall through to the label and
/// index tie-breaks.
class CentralityRanking {
 public:
  static constexpr double kScoreResolution = 1e-9;

  using OrderKey = std::tuple<long long, Label, NodeId>;

  CentralityRanking() = default;
  CentralityRanking(std::vector<double> scores, std::vector<Label> labels, bool converged,
                    std::size_t iterations)
      : scores_(std::move(scores)),
        labels_(std::move(labels)),
        converged_(converged),
        iterations_(iterations) {
    quantized_.reserve(scores_.size());
    for (double s : scores_) quantized_.push_back(std::llround(s / kScoreResolution));
  }

  std::size_t size() const noexcept { return scores_.size(); }
  double score(NodeId v) const { return scores_[v]; }
  std::span<const double> scores() const noexcept { return scores_; }
  bool converged() const noexcept { return converged_; }
  std::size_t iterations() const noexcept { return iterations_; }

  OrderKey order_key(NodeId v) const { return {-quantized_[v], labels_[v], v}; }
  bool before(NodeId a, NodeId b) const { return order_key(a) < order_key(b); }

 private:
  std::vector<double> scores_;
  std::vector<long long> quantized_;
  std::vector<Label> labels_;
  bool converged_ = true;
  std::size_t iterations_ = 0;
};

/// Power iteration on the shifted adjacency A + I from the uniform vector,
/// L2-normalised every step. The shift has the same eigenvectors as A but keeps
/// bipartite graphs from oscillating. Stops when the L1 change between
/// iterates drops below tol * n; otherwise returns the last iterate with
/// converged() == false.
inline CentralityRanking eigenvector_centrality(const Graph& g, CentralityOptions opt = {}) {
  const std::size_t n = g.node_count();
  std::vector<Label> labels(g.labels().begin(), g.labels().end());
  if (n == 0) return CentralityRanking({}, {}, true, 0);

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  bool converged = false;
  std::size_t it = 0;
  while (it < opt.max_iter) {
    ++it;
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (NodeId u : g.neighbors(static_cast<NodeId>(v))) s += x[u];
      next[v] = s;
    }
    double norm = 0.0;
    for (double s : next) norm += s * s;
    norm = std::sqrt(norm);
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= norm;
      change += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    if (change < opt.tol * static_cast<double>(n)) {
      converged = true;
      break;
    }
  }
  return CentralityRanking(std::move(x), std::move(labels), converged, it);
}

/// Stable sort of `nodes` by the ranking's order key.
inline std::vector<NodeId> sort_by_centrality(std::vector<NodeId> nodes,
                                              const CentralityRanking& r) {
  std::stable_sort(nodes.begin(), nodes.end(),
                   [&](NodeId a, NodeId b) { return r.before(a, b); });
  return nodes;
}

}  // namespace dhgak
