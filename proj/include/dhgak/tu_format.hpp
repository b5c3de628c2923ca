#pragma once

// Reader and writer for the plain-text TU benchmark layout:
//   <name>_A.txt               one "row, col" edge per line, 1-based global node ids
//   <name>_graph_indicator.txt graph id (1-based) of node i on line i
//   <name>_graph_labels.txt    class value of graph i on line i
//   <name>_node_labels.txt     optional; node label of node i on line i

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graph.hpp"

namespace dhgak {

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::filesystem::path& file, std::size_t line, const std::string& what)
      : std::runtime_error(file.string() + (line ? ":" + std::to_string(line) : std::string()) +
                           ": " + what),
        file_(file),
        line_(line) {}

  const std::filesystem::path& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

namespace tu_detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
  return v;
}

struct Line {
  std::size_t number;
  std::string text;
};

// Non-blank lines with their 1-based line numbers.
inline std::vector<Line> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DatasetError(file, 0, "cannot open file");
  std::vector<Line> lines;
  std::string s;
  std::size_t n = 0;
  while (std::getline(in, s)) {
    ++n;
    if (!trim(s).empty()) lines.push_back({n, std::move(s)});
  }
  return lines;
}

inline std::vector<long long> read_int_column(const std::filesystem::path& file) {
  std::vector<long long> out;
  for (const auto& [n, text] : read_lines(file)) {
    auto v = parse_int(text);
    if (!v) throw DatasetError(file, n, "expected an integer, got '" + text + "'");
    out.push_back(*v);
  }
  return out;
}

inline std::filesystem::path member(const std::filesystem::path& dir, const std::string& name,
                                    const char* suffix) {
  return dir / (name + suffix);
}

}  // namespace tu_detail

/// Loads a TU-format dataset. Node ids are re-based per graph preserving file
/// order. When no node-label file exists, each node is labelled with its degree.
/// File-provided node labels and graph labels are remapped to dense ids in
/// first-appearance order.
inline Dataset load_tu_dataset(const std::filesystem::path& dir, const std::string& name) {
  using namespace tu_detail;
  namespace fs = std::filesystem;

  const auto a_file = member(dir, name, "_A.txt");
  const auto ind_file = member(dir, name, "_graph_indicator.txt");
  const auto gl_file = member(dir, name, "_graph_labels.txt");
  const auto nl_file = member(dir, name, "_node_labels.txt");
  for (const auto& f : {a_file, ind_file, gl_file})
    if (!fs::exists(f)) throw DatasetError(f, 0, "missing mandatory file");

  // Graph indicator: contiguous, non-decreasing blocks starting at 1.
  std::vector<std::size_t> owner;  // global node -> graph index
  std::vector<std::size_t> offsets{0};
  {
    long long prev = 0;
    for (const auto& [n, text] : read_lines(ind_file)) {
      auto v = parse_int(text);
      if (!v) throw DatasetError(ind_file, n, "expected an integer, got '" + text + "'");
      if ((*v != prev || prev == 0) && *v != prev + 1)
        throw DatasetError(ind_file, n,
                           "graph ids must form contiguous non-decreasing blocks starting at 1 "
                           "(got " + std::to_string(*v) + " after " + std::to_string(prev) + ")");
      if (*v == prev + 1) {
        if (prev > 0) offsets.push_back(owner.size());
        prev = *v;
      }
      owner.push_back(static_cast<std::size_t>(*v - 1));
    }
    if (owner.empty()) throw DatasetError(ind_file, 0, "no nodes declared");
    offsets.push_back(owner.size());
  }
  const std::size_t graph_count = offsets.size() - 1;
  const std::size_t total_nodes = owner.size();

  const auto class_raw = read_int_column(gl_file);
  if (class_raw.size() != graph_count)
    throw DatasetError(gl_file, 0,
                       "expected " + std::to_string(graph_count) + " graph labels, found " +
                           std::to_string(class_raw.size()));

  std::vector<std::vector<std::pair<NodeId, NodeId>>> edges(graph_count);
  for (const auto& [n, text] : read_lines(a_file)) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
      throw DatasetError(a_file, n, "expected 'row, col', got '" + text + "'");
    auto r = parse_int(std::string_view(text).substr(0, comma));
    auto c = parse_int(std::string_view(text).substr(comma + 1));
    if (!r || !c) throw DatasetError(a_file, n, "expected 'row, col', got '" + text + "'");
    for (long long id : {*r, *c})
      if (id < 1 || static_cast<std::size_t>(id) > total_nodes)
        throw DatasetError(a_file, n,
                           "edge references unknown node " + std::to_string(id) + " (" +
                               std::to_string(total_nodes) + " nodes declared)");
    const auto u = static_cast<std::size_t>(*r - 1), v = static_cast<std::size_t>(*c - 1);
    if (owner[u] != owner[v])
      throw DatasetError(a_file, n, "edge connects nodes of different graphs");
    if (u == v) throw DatasetError(a_file, n, "self-loop on node " + std::to_string(*r));
    const auto base = offsets[owner[u]];
    edges[owner[u]].emplace_back(static_cast<NodeId>(u - base), static_cast<NodeId>(v - base));
  }

  LabelMaps maps;
  std::unordered_map<long long, int> class_ids;
  std::vector<int> classes;
  for (long long c : class_raw) {
    auto [it, fresh] = class_ids.try_emplace(c, static_cast<int>(maps.class_values.size()));
    if (fresh) maps.class_values.push_back(c);
    classes.push_back(it->second);
  }

  std::vector<Label> node_labels(total_nodes, 0);
  const bool has_node_labels = fs::exists(nl_file);
  if (has_node_labels) {
    const auto raw = read_int_column(nl_file);
    if (raw.size() != total_nodes)
      throw DatasetError(nl_file, 0,
                         "expected " + std::to_string(total_nodes) + " node labels, found " +
                             std::to_string(raw.size()));
    std::unordered_map<long long, Label> ids;
    for (std::size_t i = 0; i < total_nodes; ++i) {
      auto [it, fresh] = ids.try_emplace(raw[i], static_cast<Label>(maps.node_label_values.size()));
      if (fresh) maps.node_label_values.push_back(raw[i]);
      node_labels[i] = it->second;
    }
  }
  maps.node_labels_from_degree = !has_node_labels;

  std::vector<Graph> graphs;
  graphs.reserve(graph_count);
  std::size_t max_degree = 0;
  for (std::size_t gi = 0; gi < graph_count; ++gi) {
    const auto n = offsets[gi + 1] - offsets[gi];
    if (has_node_labels) {
      std::vector<Label> labels(node_labels.begin() + static_cast<std::ptrdiff_t>(offsets[gi]),
                                node_labels.begin() + static_cast<std::ptrdiff_t>(offsets[gi + 1]));
      graphs.push_back(Graph::from_edges(n, edges[gi], std::move(labels), classes[gi]));
    } else {
      graphs.push_back(Graph::with_degree_labels(n, edges[gi], classes[gi]));
      for (std::size_t v = 0; v < n; ++v)
        max_degree = std::max(max_degree, graphs.back().degree(static_cast<NodeId>(v)));
    }
  }

  std::size_t alphabet = maps.node_label_values.size();
  if (!has_node_labels) {
    alphabet = max_degree + 1;
    for (std::size_t d = 0; d < alphabet; ++d)
      maps.node_label_values.push_back(static_cast<long long>(d));
  }
  const std::size_t class_count = maps.class_values.size();
  return Dataset(name, std::move(graphs), alphabet, class_count, std::move(maps));
}

/// Writes a dataset in TU layout using the original label values so that
/// load_tu_dataset reproduces it exactly. Degree-labelled datasets are written
/// without a node-label file.
inline void write_tu_dataset(const Dataset& d, const std::filesystem::path& dir) {
  using tu_detail::member;
  std::filesystem::create_directories(dir);
  const auto& name = d.name();
  const auto& maps = d.label_maps();
  auto class_value = [&](int c) {
    return maps.class_values.empty() ? static_cast<long long>(c) : maps.class_values[c];
  };
  auto node_value = [&](Label l) {
    return maps.node_label_values.empty() ? static_cast<long long>(l) : maps.node_label_values[l];
  };
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw DatasetError(p, 0, "cannot open for writing");
    return out;
  };

  auto a = open(member(dir, name, "_A.txt"));
  auto ind = open(member(dir, name, "_graph_indicator.txt"));
  auto gl = open(member(dir, name, "_graph_labels.txt"));
  std::optional<std::ofstream> nl;
  if (!maps.node_labels_from_degree) nl = open(member(dir, name, "_node_labels.txt"));

  for (std::size_t gi = 0; gi < d.size(); ++gi) {
    const auto& g = d[gi];
    const auto base = d.node_offset(gi);
    gl << class_value(g.graph_label()) << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v) {
      ind << gi + 1 << '\n';
      if (nl) *nl << node_value(g.label(v)) << '\n';
      for (NodeId u : g.neighbors(v)) a << base + v + 1 << ", " << base + u + 1 << '\n';
    }
  }
}

}  // namespace dhgak
