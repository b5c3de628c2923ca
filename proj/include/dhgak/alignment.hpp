#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "clustering.hpp"
#include "format.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace dhgak {

/// k-means with k = max(2, round(N * cluster_factor)), N the graph count.
struct KMeansMethod {
  bool operator==(const KMeansMethod&) const = default;
};

/// DBSCAN; eps defaults to the median min_pts-NN distance of a 1000-point sample.
struct DbscanMethod {
  std::optional<double> eps;
  std::size_t min_pts = 4;
  bool operator==(const DbscanMethod&) const = default;
};

/// Clusters each slice by the graph it belongs to.
struct OracleMethod {
  bool operator==(const OracleMethod&) const = default;
};

using ClusteringMethod = std::variant<KMeansMethod, DbscanMethod, OracleMethod>;

inline std::string to_string(const ClusteringMethod& m) {
  if (std::holds_alternative<KMeansMethod>(m)) return "kmeans";
  if (std::holds_alternative<OracleMethod>(m)) return "oracle";
  const auto& d = std::get<DbscanMethod>(m);
  std::string s = "dbscan";
  if (d.eps || d.min_pts != 4) {
    s += ":min_pts=" + std::to_string(d.min_pts);
    if (d.eps) s += ",eps=" + format_real(*d.eps);
  }
  return s;
}

/// Parses "kmeans", "oracle", "dbscan" or "dbscan:eps=0.5,min_pts=4".
inline ClusteringMethod parse_clustering_method(const std::string& text) {
  if (text == "kmeans" || text == "k-means") return KMeansMethod{};
  if (text == "oracle") return OracleMethod{};
  if (text.rfind("dbscan", 0) == 0) {
    DbscanMethod m;
    if (text.size() > 6) {
      if (text[6] != ':') throw std::invalid_argument("bad clustering method '" + text + "'");
      std::size_t pos = 7;
      while (pos < text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const auto item = text.substr(pos, end - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("bad dbscan option '" + item + "'");
        const auto key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "eps")
          m.eps = std::stod(value);
        else if (key == "min_pts")
          m.min_pts = std::stoul(value);
        else
          throw std::invalid_argument("unknown dbscan option '" + key + "'");
        pos = end + 1;
      }
    }
    return m;
  }
  throw std::invalid_argument("unknown clustering method '" + text + "'");
}

/// The clustering set together with the number of repetitions per method.
struct ClusteringConfig {
  std::vector<ClusteringMethod> methods{KMeansMethod{}};
  std::size_t experiments = 3;  // T
  double cluster_factor = 1.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::size_t kmeans_clusters(std::size_t graph_count) const {
    const auto k = std::llround(static_cast<double>(graph_count) * cluster_factor);
    return static_cast<std::size_t>(std::max<long long>(2, k));
  }

  void validate() const {
    if (experiments == 0) throw std::invalid_argument("ClusteringConfig: T must be >= 1");
    if (methods.empty()) throw std::invalid_argument("ClusteringConfig: no clustering method");
    if (!(cluster_factor > 0.0))
      throw std::invalid_argument("ClusteringConfig: cluster_factor must be > 0");
  }
};

/// Sparse concatenation of scaled cluster indicators, one block per (method,
/// run). Each row has one entry of value 1/sqrt(T|methods|) per block, or none
/// when that run labelled the slice as noise.
class AlignmentFeatureMap {
 public:
  AlignmentFeatureMap() = default;

  /// Assembles the map from per-run assignments over the same rows, in block
  /// order. The scale is 1/sqrt(number of runs).
  explicit AlignmentFeatureMap(std::span<const Assignment> runs) {
    if (runs.empty()) throw std::invalid_argument("AlignmentFeatureMap: no runs");
    rows_ = runs.front().cluster.size();
    scale_ = 1.0 / std::sqrt(static_cast<double>(runs.size()));
    std::size_t offset = 0;
    for (const auto& a : runs) {
      if (a.cluster.size() != rows_)
        throw std::invalid_argument("AlignmentFeatureMap: runs cover different row counts");
      offsets_.push_back(offset);
      widths_.push_back(a.cluster_count);
      offset += a.cluster_count;
    }
    width_ = offset;
    cols_.resize(rows_ * runs.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t b = 0; b < runs.size(); ++b) {
        const int c = runs[b].cluster[r];
        if (c != Assignment::kNoise && static_cast<std::size_t>(c) >= widths_[b])
          throw std::invalid_argument("AlignmentFeatureMap: cluster id out of range");
        cols_[r * runs.size() + b] =
            c == Assignment::kNoise ? -1 : static_cast<std::int64_t>(offsets_[b]) + c;
      }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t block_count() const noexcept { return offsets_.size(); }
  std::size_t block_offset(std::size_t b) const { return offsets_[b]; }
  std::size_t block_width(std::size_t b) const { return widths_[b]; }
  double scale() const noexcept { return scale_; }

  /// Global column of row's entry in block b, or -1.
  std::int64_t column(std::size_t row, std::size_t block) const {
    return cols_[row * block_count() + block];
  }

  /// Dense row (length width()).
  std::vector<double> dense_row(std::size_t row) const {
    std::vector<double> v(width_, 0.0);
    for (std::size_t b = 0; b < block_count(); ++b)
      if (auto c = column(row, b); c >= 0) v[static_cast<std::size_t>(c)] = scale_;
    return v;
  }

  double squared_norm(std::size_t row) const {
    std::size_t hits = 0;
    for (std::size_t b = 0; b < block_count(); ++b) hits += column(row, b) >= 0;
    return static_cast<double>(hits) * scale_ * scale_;
  }

  /// (row, col, value) triplets, one per line, for debugging.
  void write_triplets(std::ostream& out) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", scale_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t b = 0; b < block_count(); ++b)
        if (auto c = column(r, b); c >= 0) out << r << ' ' << c << ' ' << buf << '\n';
  }

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 0;
  double scale_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> widths_;
  std::vector<std::int64_t> cols_;
};

/// Deep alignment kernel value: inner product of two feature-map rows.
inline double dak_value(const AlignmentFeatureMap& map, std::size_t x, std::size_t y) {
  double s = 0.0;
  for (std::size_t b = 0; b < map.block_count(); ++b) {
    const auto cx = map.column(x, b), cy = map.column(y, b);
    if (cx >= 0 && cx == cy) s += map.scale() * map.scale();
  }
  return s;
}

/// Runs every (method, run) of the config on all slice embeddings of one hop
/// jointly and returns the raw assignments in block order. Run (m, t) is
/// seeded from (seed, hop, m, t).
inline std::vector<Assignment> run_clusterings(const PointSet& embeddings,
                                               std::span<const std::size_t> node_offsets,
                                               const ClusteringConfig& cfg, std::size_t hop) {
  cfg.validate();
  if (node_offsets.empty() || node_offsets.back() != embeddings.size())
    throw std::invalid_argument("run_clusterings: row index does not match embeddings");
  const std::size_t graphs = node_offsets.size() - 1;
  const std::size_t runs = cfg.methods.size() * cfg.experiments;
  std::vector<Assignment> out(runs);
  parallel_for(runs, cfg.jobs, [&](std::size_t i) {
    const std::size_t m = i / cfg.experiments, t = i % cfg.experiments;
    const auto sub_seed =
        derive_seed(cfg.seed, {static_cast<std::uint64_t>(SeedStream::clustering), hop, m, t});
    const auto& method = cfg.methods[m];
    if (std::holds_alternative<KMeansMethod>(method)) {
      out[i] = kmeans(embeddings, cfg.kmeans_clusters(graphs), sub_seed);
    } else if (std::holds_alternative<OracleMethod>(method)) {
      out[i] = oracle_clustering(node_offsets);
    } else {
      const auto& db = std::get<DbscanMethod>(method);
      const double eps = db.eps ? *db.eps : dbscan_default_eps(embeddings, db.min_pts, sub_seed);
      out[i] = dbscan(embeddings, eps, db.min_pts);
    }
  });
  return out;
}

/// Feature map of the alignment kernel for one hop (cross-graph clustering of
/// all slices of that hop).
inline AlignmentFeatureMap build_feature_map(const PointSet& embeddings,
                                             std::span<const std::size_t> node_offsets,
                                             const ClusteringConfig& cfg, std::size_t hop) {
  const auto runs = run_clusterings(embeddings, node_offsets, cfg, hop);
  return AlignmentFeatureMap(runs);
}

}  // namespace dhgak
