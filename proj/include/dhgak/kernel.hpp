#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alignment.hpp"
#include "config.hpp"
#include "embedder.hpp"
#include "graph.hpp"
#include "slicer.hpp"

namespace dhgak {

enum class GramStage { per_hop, summed, normalized };

inline const char* to_string(GramStage s) {
  switch (s) {
    case GramStage::per_hop: return "per-hop";
    case GramStage::summed: return "summed";
    case GramStage::normalized: return "normalized";
  }
  return "?";
}

inline GramStage parse_gram_stage(const std::string& s) {
  if (s == "per-hop") return GramStage::per_hop;
  if (s == "summed") return GramStage::summed;
  if (s == "normalized") return GramStage::normalized;
  throw std::invalid_argument("unknown Gram stage '" + s + "'");
}

/// Dense symmetric N x N kernel matrix.
class GramMatrix {
 public:
  GramMatrix() = default;
  GramMatrix(std::size_t n, GramStage stage) : n_(n), values_(n * n, 0.0), stage_(stage) {}
  GramMatrix(std::size_t n, std::vector<double> values, GramStage stage)
      : n_(n), values_(std::move(values)), stage_(stage) {
    if (values_.size() != n * n) throw std::invalid_argument("GramMatrix: expected N*N values");
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * n_, n_);
  }

  GramStage stage() const noexcept { return stage_; }
  void set_stage(GramStage s) noexcept { stage_ = s; }
  // Hop of a per-hop matrix; meaningless for other stages.
  std::size_t hop() const noexcept { return hop_; }
  void set_hop(std::size_t h) noexcept { hop_ = h; }
  /// RunConfig::canonical() of the run that produced the matrix (may be empty).
  const std::string& config_text() const noexcept { return config_text_; }
  void set_config_text(std::string t) { config_text_ = std::move(t); }

  /// Same graphs in a new order: result(i, j) = this(order[i], order[j]).
  GramMatrix permuted(std::span<const std::size_t> order) const {
    GramMatrix out(*this);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(i, j) = (*this)(order[i], order[j]);
    return out;
  }

  bool operator==(const GramMatrix& o) const { return n_ == o.n_ && values_ == o.values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
  GramStage stage_ = GramStage::per_hop;
  std::size_t hop_ = 0;
  std::string config_text_;
};

/// Sparse kernel mean embedding of one graph: sorted (column, value) pairs.
using MeanEmbedding = std::vector<std::pair<std::size_t, double>>;

namespace kernel_detail {

/// Per-graph means of the unscaled indicator rows (entries k / |rows|).
inline std::vector<MeanEmbedding> indicator_means(const AlignmentFeatureMap& map,
                                                  std::span<const std::size_t> node_offsets) {
  if (node_offsets.empty() || node_offsets.back() != map.rows())
    throw std::invalid_argument("mean_embeddings: graph partition does not cover the map rows");
  const std::size_t graphs = node_offsets.size() - 1;
  std::vector<MeanEmbedding> out(graphs);
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t g = 0; g < graphs; ++g) {
    const auto begin = node_offsets[g], end = node_offsets[g + 1];
    if (begin == end) continue;
    counts.clear();
    for (std::size_t r = begin; r < end; ++r)
      for (std::size_t b = 0; b < map.block_count(); ++b)
        if (auto c = map.column(r, b); c >= 0) ++counts[static_cast<std::size_t>(c)];
    const double rows = static_cast<double>(end - begin);
    out[g].reserve(counts.size());
    for (auto [c, k] : counts) out[g].emplace_back(c, static_cast<double>(k) / rows);
  }
  return out;
}

}  // namespace kernel_detail

/// Mean of each graph's feature-map rows. Graphs without rows get an empty
/// (zero) embedding.
inline std::vector<MeanEmbedding> mean_embeddings(const AlignmentFeatureMap& map,
                                                  std::span<const std::size_t> node_offsets) {
  auto means = kernel_detail::indicator_means(map, node_offsets);
  for (auto& m : means)
    for (auto& e : m) e.second *= map.scale();
  return means;
}

inline double sparse_dot(const MeanEmbedding& a, const MeanEmbedding& b) {
  double s = 0.0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) ++i;
    else if (j->first < i->first) ++j;
    else s += (i++)->second * (j++)->second;
  }
  return s;
}

/// Per-hop graph alignment kernel: inner products of the graphs' kernel mean
/// embeddings of the alignment feature map.
inline GramMatrix dgak_gram(const AlignmentFeatureMap& map, std::span<const std::size_t> node_offsets,
                            std::vector<std::string>* warnings = nullptr) {
  // The squared scale 1/(T|methods|) is applied once per entry.
  const auto means = kernel_detail::indicator_means(map, node_offsets);
  const auto runs = static_cast<double>(map.block_count());
  const std::size_t n = means.size();
  GramMatrix k(n, GramStage::per_hop);
  for (std::size_t i = 0; i < n; ++i) {
    if (warnings && node_offsets[i] == node_offsets[i + 1])
      warnings->push_back("graph " + std::to_string(i) + " has no slices; its kernel row is zero");
    for (std::size_t j = i; j < n; ++j) k(i, j) = k(j, i) = sparse_dot(means[i], means[j]) / runs;
  }
  return k;
}

/// Element-wise sum of per-hop matrices, in the order given.
inline GramMatrix dhgak_gram(std::span<const GramMatrix> per_hop) {
  if (per_hop.empty()) throw std::invalid_argument("dhgak_gram: no per-hop matrices");
  const std::size_t n = per_hop.front().size();
  GramMatrix sum(n, GramStage::summed);
  std::vector<double> acc(n * n, 0.0);
  for (const auto& k : per_hop) {
    if (k.size() != n)
      throw std::invalid_argument("dhgak_gram: shape mismatch (" + std::to_string(k.size()) +
                                  " vs " + std::to_string(n) + ")");
    const auto v = k.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  GramMatrix out(n, std::move(acc), GramStage::summed);
  out.set_config_text(per_hop.front().config_text());
  return out;
}

class NonPositiveDiagonal : public std::domain_error {
 public:
  explicit NonPositiveDiagonal(std::size_t index)
      : std::domain_error("normalize_gram: K(" + std::to_string(index) + "," +
                          std::to_string(index) + ") <= 0"),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Cosine normalisation K(i,j) / sqrt(K(i,i) K(j,j)); the diagonal is set to
/// exactly 1.
inline GramMatrix normalize_gram(const GramMatrix& k) {
  const std::size_t n = k.size();
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(k(i, i) > 0.0)) throw NonPositiveDiagonal(i);
    inv[i] = 1.0 / std::sqrt(k(i, i));
  }
  GramMatrix out(n, GramStage::normalized);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = out(j, i) = k(i, j) * inv[i] * inv[j];
  }
  out.set_config_text(k.config_text());
  return out;
}

struct StageTimings {
  double encode_seconds = 0.0;
  double embed_seconds = 0.0;  // label embedding training + table construction
  double cluster_seconds = 0.0;
  double gram_seconds = 0.0;

  double slicing_and_embedding() const { return encode_seconds + embed_seconds; }
};

struct DhgakResult {
  GramMatrix normalized;
  GramMatrix summed;
  std::vector<GramMatrix> per_hop;  // hops in summation order
  EmbeddingTable embeddings;
  StageTimings timings;
  std::vector<std::string> warnings;
};

namespace kernel_detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace kernel_detail

/// Label embedding for a configuration: one-hot, or skip-gram trained on all
/// slice encodings of hops 0..corpus_max_hop.
inline LabelEmbedding label_embedding_for(const Dataset& d, const SliceTable& slices,
                                          const RunConfig& cfg) {
  if (cfg.backend == EmbeddingBackend::onehot) return one_hot_embedding(d.label_alphabet_size());
  const auto sentences = slices.sentences(cfg.corpus_hop());
  return train_skipgram(sentences, d.label_alphabet_size(), cfg.skipgram());
}

/// Slice encoding + label embedding + deep embedding table for hops 0..H.
inline EmbeddingTable embed_dataset(const Dataset& d, const RunConfig& cfg,
                                    StageTimings* timings = nullptr) {
  kernel_detail::Stopwatch sw;
  const std::size_t corpus_hop = cfg.backend == EmbeddingBackend::skipgram ? cfg.corpus_hop() : cfg.max_hop;
  const auto slices = encode_dataset(d, SliceSpec{cfg.width, corpus_hop});
  if (timings) timings->encode_seconds += sw.lap();
  const auto g = label_embedding_for(d, slices, cfg);
  auto table = build_embedding_table(slices, g, cfg.alpha, cfg.max_hop);
  if (timings) timings->embed_seconds += sw.lap();
  return table;
}

/// Per-hop Gram matrix for one hop of an embedding table.
inline GramMatrix hop_gram(const Dataset& d, const EmbeddingTable& table, std::size_t hop,
                           const ClusteringConfig& cc, StageTimings* timings = nullptr,
                           std::vector<std::string>* warnings = nullptr) {
  kernel_detail::Stopwatch sw;
  const PointSet pts{table.hop(hop), table.dim()};
  const auto runs = run_clusterings(pts, d.node_offsets(), cc, hop);
  if (warnings)
    for (const auto& r : runs) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
  const AlignmentFeatureMap map(runs);
  if (timings) timings->cluster_seconds += sw.lap();
  auto k = dgak_gram(map, d.node_offsets(), warnings);
  k.set_hop(hop);
  if (timings) timings->gram_seconds += sw.lap();
  return k;
}

/// The full pipeline: slices -> label embedding -> deep embeddings ->
/// per-hop alignment kernels -> hop sum -> cosine normalisation. Every random
/// choice derives from cfg.seed. Pass `cached` to skip the embedding stage.
inline DhgakResult compute_dhgak(const Dataset& d, const RunConfig& cfg, std::size_t jobs = 1,
                                 const EmbeddingTable* cached = nullptr) {
  cfg.validate();
  if (d.size() < 2) throw std::invalid_argument("compute_dhgak: need at least 2 graphs");
  DhgakResult res;
  res.embeddings = cached ? *cached : embed_dataset(d, cfg, &res.timings);
  if (res.embeddings.hop_count() != cfg.max_hop + 1 || res.embeddings.rows() != d.total_nodes())
    throw std::invalid_argument("compute_dhgak: embedding table does not match dataset/config");

  const auto cc = cfg.clustering(jobs);
  const auto text = cfg.canonical();
  for (std::size_t h = cfg.include_hop_zero ? 0 : 1; h <= cfg.max_hop; ++h) {
    res.per_hop.push_back(hop_gram(d, res.embeddings, h, cc, &res.timings, &res.warnings));
    res.per_hop.back().set_config_text(text);
  }
  res.summed = dhgak_gram(res.per_hop);
  res.normalized = normalize_gram(res.summed);
  return res;
}

// ---------------------------------------------------------------------------
// Gram matrix files: CSV values plus a JSON sidecar with the producing config.

class MetadataMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  return p.replace_extension(".json");
}

inline void write_gram_csv(const GramMatrix& k, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (std::size_t j = 0; j < k.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", k(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

/// Writes `<path>` (CSV) and its `.json` sidecar.
inline void save_gram(const GramMatrix& k, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_gram_csv(k, out);
  }
  nlohmann::ordered_json meta;
  meta["n"] = k.size();
  meta["stage"] = to_string(k.stage());
  if (k.stage() == GramStage::per_hop) meta["hop"] = k.hop();
  meta["config_hash"] = fnv1a_hex(k.config_text());
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  std::istringstream lines(k.config_text());
  for (std::string line; std::getline(lines, line);)
    if (auto eq = line.find('='); eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 1);
  meta["config"] = cfg;
  meta["config_text"] = k.config_text();
  std::ofstream out(sidecar_path(path));
  if (!out) throw std::runtime_error("cannot write " + sidecar_path(path).string());
  out << meta.dump(2) << '\n';
}

/// Reads a Gram CSV and validates it against its sidecar. With `expected`,
/// the sidecar must also describe exactly that configuration.
inline GramMatrix load_gram(const std::filesystem::path& path, const RunConfig* expected = nullptr) {
  std::ifstream meta_in(sidecar_path(path));
  if (!meta_in) throw MetadataMismatch("missing metadata sidecar " + sidecar_path(path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw MetadataMismatch("unreadable metadata " + sidecar_path(path).string() + ": " + e.what());
  }
  const auto text = meta.value("config_text", std::string());
  if (meta.value("config_hash", std::string()) != fnv1a_hex(text))
    throw MetadataMismatch("metadata hash does not match its config in " + sidecar_path(path).string());
  if (expected && text != expected->canonical())
    throw MetadataMismatch("Gram " + path.string() + " was produced by a different configuration (" +
                           fnv1a_hex(text) + " vs " + config_hash(*expected) + ")");

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> values;
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) values.push_back(std::stod(cell));
    ++rows;
  }
  const std::size_t n = meta.value("n", std::size_t{0});
  if (rows != n || values.size() != n * n)
    throw MetadataMismatch("Gram " + path.string() + " shape does not match its metadata (n=" +
                           std::to_string(n) + ")");
  GramMatrix k(n, std::move(values), parse_gram_stage(meta.value("stage", std::string("normalized"))));
  k.set_config_text(text);
  if (meta.contains("hop")) k.set_hop(meta["hop"].get<std::size_t>());
  return k;
}

}  // namespace dhgak
