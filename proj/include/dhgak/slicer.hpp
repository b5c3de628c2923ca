#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "centrality.hpp"
#include "graph.hpp"

namespace dhgak {

/// Slice width b (depth of the BFS neighbourhood taken around every frontier
/// node) and maximum hop H.
struct SliceSpec {
  std::size_t width = 0;
  std::size_t max_hop = 0;
};

struct SliceSource {
  std::size_t graph = 0;
  NodeId node = 0;
  std::size_t hop = 0;
};

struct SliceEncoding {
  std::vector<Label> labels;
  SliceSource source;
};

/// Nodes at shortest-path distance exactly r from v, in discovery order.
inline std::vector<NodeId> bfs_leaves(const Graph& g, NodeId v, std::size_t r) {
  std::vector<NodeId> frontier{v};
  std::vector<char> seen(g.node_count(), 0);
  seen[v] = 1;
  for (std::size_t d = 0; d < r && !frontier.empty(); ++d) {
    std::vector<NodeId> next;
    for (NodeId u : frontier)
      for (NodeId w : g.neighbors(u))
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
    frontier.swap(next);
  }
  return frontier;
}

/// Truncated BFS trees for every node of one graph, each layer pre-sorted in
/// centrality order. Built once per graph and reused by every slice.
class BfsLayers {
 public:
  BfsLayers(const Graph& g, const CentralityRanking& rank, std::size_t depth)
      : depth_(depth), layers_(g.node_count()) {
    std::vector<std::size_t> stamp(g.node_count(), SIZE_MAX);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      auto& out = layers_[v];
      out.push_back({v});
      stamp[v] = v;
      for (std::size_t d = 0; d < depth; ++d) {
        std::vector<NodeId> next;
        for (NodeId u : out.back())
          for (NodeId w : g.neighbors(u))
            if (stamp[w] != v) {
              stamp[w] = v;
              next.push_back(w);
            }
        if (next.empty()) break;
        std::stable_sort(next.begin(), next.end(),
                         [&](NodeId a, NodeId b) { return rank.before(a, b); });
        out.push_back(std::move(next));
      }
    }
  }

  std::size_t depth() const noexcept { return depth_; }

  std::span<const NodeId> layer(NodeId v, std::size_t d) const {
    const auto& l = layers_[v];
    return d < l.size() ? std::span<const NodeId>(l[d]) : std::span<const NodeId>();
  }

 private:
  std::size_t depth_;
  std::vector<std::vector<std::vector<NodeId>>> layers_;
};

/// Appends the labels of the width-b hop-h slice of v to `out`: frontier
/// nodes in centrality order, each followed by its own 0..b BFS layers.
/// Nodes may repeat. `layers` must reach depth max(h, b).
inline void append_slice_labels(const Graph& g, const BfsLayers& layers, NodeId v, std::size_t hop,
                                std::size_t width, std::vector<Label>& out) {
  for (NodeId u : layers.layer(v, hop))
    for (std::size_t i = 0; i <= width; ++i)
      for (NodeId w : layers.layer(u, i)) out.push_back(g.label(w));
}

/// Slice encoding of a single node, computed from scratch.
inline SliceEncoding encode_slice(const Graph& g, const CentralityRanking& rank, NodeId v,
                                  std::size_t hop, std::size_t width) {
  SliceEncoding enc;
  enc.source = {0, v, hop};
  for (NodeId u : sort_by_centrality(bfs_leaves(g, v, hop), rank))
    for (std::size_t i = 0; i <= width; ++i)
      for (NodeId w : sort_by_centrality(bfs_leaves(g, u, i), rank)) enc.labels.push_back(g.label(w));
  return enc;
}

/// Encodings of every node of every graph at hops 0..H, stored per hop in CSR
/// form. Row r of a hop is node r of the dataset's stacked node order.
class SliceTable {
 public:
  SliceTable() = default;
  SliceTable(SliceSpec spec, std::size_t rows) : spec_(spec), rows_(rows), hops_(spec.max_hop + 1) {
    for (auto& h : hops_) h.starts.reserve(rows + 1), h.starts.push_back(0);
  }

  const SliceSpec& spec() const noexcept { return spec_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t hop_count() const noexcept { return hops_.size(); }

  std::span<const Label> tokens(std::size_t hop, std::size_t row) const {
    const auto& h = hops_[hop];
    return std::span<const Label>(h.tokens).subspan(h.starts[row], h.starts[row + 1] - h.starts[row]);
  }

  std::size_t token_count(std::size_t hop) const { return hops_[hop].tokens.size(); }

  /// All non-empty encodings of hops [0, last_hop] as sentences, hop-major.
  std::vector<std::span<const Label>> sentences(std::size_t last_hop) const {
    std::vector<std::span<const Label>> out;
    for (std::size_t h = 0; h <= std::min(last_hop, hops_.size() - 1); ++h)
      for (std::size_t r = 0; r < rows_; ++r)
        if (auto t = tokens(h, r); !t.empty()) out.push_back(t);
    return out;
  }

  // Builder interface used by encode_dataset; rows must be appended in order.
  std::vector<Label>& open_row(std::size_t hop) { return hops_[hop].tokens; }
  void close_row(std::size_t hop) { hops_[hop].starts.push_back(hops_[hop].tokens.size()); }

 private:
  struct Hop {
    std::vector<std::size_t> starts;
    std::vector<Label> tokens;
  };
  SliceSpec spec_;
  std::size_t rows_ = 0;
  std::vector<Hop> hops_;
};

/// Encodes every node at hops 0..H. Centrality and truncated BFS trees are
/// computed once per graph.
inline SliceTable encode_dataset(const Dataset& d, SliceSpec spec, CentralityOptions opt = {}) {
  SliceTable table(spec, d.total_nodes());
  const std::size_t depth = std::max(spec.max_hop, spec.width);
  for (const auto& g : d.graphs()) {
    const auto rank = eigenvector_centrality(g, opt);
    const BfsLayers layers(g, rank, depth);
    for (std::size_t h = 0; h <= spec.max_hop; ++h)
      for (NodeId v = 0; v < g.node_count(); ++v) {
        append_slice_labels(g, layers, v, h, spec.width, table.open_row(h));
        table.close_row(h);
      }
  }
  return table;
}

}  // namespace dhgak
