#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dhgak {

using NodeId = std::uint32_t;
using Label = std::uint32_t;

/// Immutable simple undirected graph with integer node labels and a class label.
class Graph {
 public:
  Graph() = default;

  /// Takes per-node neighbor lists. Lists are sorted on entry; the result must
  /// be symmetric, free of self-loops and duplicates, or std::invalid_argument
  /// is thrown.
  Graph(std::vector<std::vector<NodeId>> adjacency, std::vector<Label> labels,
        int graph_label = 0)
      : adjacency_(std::move(adjacency)), labels_(std::move(labels)), graph_label_(graph_label) {
    if (labels_.size() != adjacency_.size())
      throw std::invalid_argument("Graph: label count " + std::to_string(labels_.size()) +
                                  " != node count " + std::to_string(adjacency_.size()));
    if (graph_label_ < 0) throw std::invalid_argument("Graph: negative class label");
    const auto n = adjacency_.size();
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    for (std::size_t v = 0; v < n; ++v) {
      const auto& nbrs = adjacency_[v];
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const NodeId u = nbrs[i];
        if (u >= n) throw std::invalid_argument("Graph: neighbor index out of range");
        if (u == v) throw std::invalid_argument("Graph: self-loop at node " + std::to_string(v));
        if (i > 0 && nbrs[i - 1] == u)
          throw std::invalid_argument("Graph: duplicate edge " + std::to_string(v) + "-" +
                                      std::to_string(u));
        if (!std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), static_cast<NodeId>(v)))
          throw std::invalid_argument("Graph: asymmetric adjacency " + std::to_string(v) + "->" +
                                      std::to_string(u));
      }
      edge_count_ += nbrs.size();
    }
    edge_count_ /= 2;
  }

  /// Builds from an undirected edge list. Duplicate edges (in either direction)
  /// are merged; self-loops are rejected.
  static Graph from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges,
                          std::vector<Label> labels, int graph_label = 0) {
    std::vector<std::vector<NodeId>> adj(node_count);
    for (auto [a, b] : edges) {
      if (a >= node_count || b >= node_count)
        throw std::invalid_argument("Graph: edge endpoint out of range");
      if (a == b) throw std::invalid_argument("Graph: self-loop at node " + std::to_string(a));
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (auto& nbrs : adj) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return Graph(std::move(adj), std::move(labels), graph_label);
  }

  /// Same as from_edges, but every node is labelled with its degree.
  static Graph with_degree_labels(std::size_t node_count,
                                  std::span<const std::pair<NodeId, NodeId>> edges,
                                  int graph_label = 0) {
    Graph g = from_edges(node_count, edges, std::vector<Label>(node_count, 0), graph_label);
    for (std::size_t v = 0; v < node_count; ++v)
      g.labels_[v] = static_cast<Label>(g.adjacency_[v].size());
    return g;
  }

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  Label label(NodeId v) const { return labels_[v]; }
  std::span<const Label> labels() const noexcept { return labels_; }
  int graph_label() const noexcept { return graph_label_; }

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Label> labels_;
  int graph_label_ = 0;
  std::size_t edge_count_ = 0;
};

/// Maps dense ids back to the values found in the source files.
struct LabelMaps {
  std::vector<long long> node_label_values;  // dense node label -> original value
  std::vector<long long> class_values;       // dense class -> original value
  bool node_labels_from_degree = false;

  bool operator==(const LabelMaps&) const = default;
};

/// Ordered, immutable collection of graphs with dense label and class alphabets.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::string name, std::vector<Graph> graphs, std::size_t label_alphabet_size,
          std::size_t class_count, LabelMaps maps = {})
      : name_(std::move(name)),
        graphs_(std::move(graphs)),
        label_alphabet_size_(label_alphabet_size),
        class_count_(class_count),
        maps_(std::move(maps)) {
    if (graphs_.empty()) throw std::invalid_argument("Dataset: no graphs");
    for (std::size_t i = 0; i < graphs_.size(); ++i) {
      const auto& g = graphs_[i];
      if (static_cast<std::size_t>(g.graph_label()) >= class_count_)
        throw std::invalid_argument("Dataset: graph " + std::to_string(i) + " has class " +
                                    std::to_string(g.graph_label()) + " outside 0.." +
                                    std::to_string(class_count_) + ")");
      for (Label l : g.labels())
        if (l >= label_alphabet_size_)
          throw std::invalid_argument("Dataset: graph " + std::to_string(i) + " has node label " +
                                      std::to_string(l) + " outside alphabet of size " +
                                      std::to_string(label_alphabet_size_));
    }
    offsets_.resize(graphs_.size() + 1, 0);
    for (std::size_t i = 0; i < graphs_.size(); ++i)
      offsets_[i + 1] = offsets_[i] + graphs_[i].node_count();
  }

  /// Infers alphabet and class counts from the graphs (max + 1).
  static Dataset from_graphs(std::string name, std::vector<Graph> graphs) {
    std::size_t alphabet = 1, classes = 1;
    for (const auto& g : graphs) {
      classes = std::max(classes, static_cast<std::size_t>(g.graph_label()) + 1);
      for (Label l : g.labels()) alphabet = std::max(alphabet, static_cast<std::size_t>(l) + 1);
    }
    return Dataset(std::move(name), std::move(graphs), alphabet, classes);
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return graphs_.size(); }
  const Graph& operator[](std::size_t i) const { return graphs_[i]; }
  const std::vector<Graph>& graphs() const noexcept { return graphs_; }
  std::size_t label_alphabet_size() const noexcept { return label_alphabet_size_; }
  std::size_t class_count() const noexcept { return class_count_; }
  const LabelMaps& label_maps() const noexcept { return maps_; }

  // Rows of all nodes stacked graph by graph: row = node_offset(g) + v.
  std::size_t total_nodes() const noexcept { return offsets_.back(); }
  std::size_t node_offset(std::size_t graph) const { return offsets_[graph]; }
  std::span<const std::size_t> node_offsets() const noexcept { return offsets_; }

  std::vector<int> class_labels() const {
    std::vector<int> y;
    y.reserve(graphs_.size());
    for (const auto& g : graphs_) y.push_back(g.graph_label());
    return y;
  }

  /// New dataset holding the given graphs in the given order (alphabets kept).
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<Graph> gs;
    gs.reserve(indices.size());
    for (auto i : indices) gs.push_back(graphs_.at(i));
    return Dataset(name_, std::move(gs), label_alphabet_size_, class_count_, maps_);
  }

  bool operator==(const Dataset& o) const {
    return name_ == o.name_ && graphs_ == o.graphs_ &&
           label_alphabet_size_ == o.label_alphabet_size_ && class_count_ == o.class_count_ &&
           maps_ == o.maps_;
  }

 private:
  std::string name_;
  std::vector<Graph> graphs_;
  std::size_t label_alphabet_size_ = 0;
  std::size_t class_count_ = 0;
  LabelMaps maps_;
  std::vector<std::size_t> offsets_{0};
};

struct GraphStats {
  std::size_t graph_count = 0;
  std::size_t class_count = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  std::size_t label_alphabet_size = 0;
};

inline GraphStats graph_stats(const Dataset& d) {
  GraphStats s;
  s.graph_count = d.size();
  s.class_count = d.class_count();
  s.label_alphabet_size = d.label_alphabet_size();
  double nodes = 0.0, edges = 0.0;
  for (const auto& g : d.graphs()) {
    nodes += static_cast<double>(g.node_count());
    edges += static_cast<double>(g.edge_count());
  }
  s.avg_nodes = nodes / static_cast<double>(d.size());
  s.avg_edges = edges / static_cast<double>(d.size());
  return s;
}

}  // namespace dhgak
