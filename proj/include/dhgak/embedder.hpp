#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"
#include "slicer.hpp"

namespace dhgak {

enum class EmbeddingBackend { skipgram, onehot };

inline const char* to_string(EmbeddingBackend b) {
  return b == EmbeddingBackend::skipgram ? "word2vec" : "onehot";
}

inline EmbeddingBackend parse_backend(const std::string& s) {
  if (s == "word2vec" || s == "w2v" || s == "skipgram") return EmbeddingBackend::skipgram;
  if (s == "onehot" || s == "one-hot") return EmbeddingBackend::onehot;
  throw std::invalid_argument("unknown embedding backend '" + s + "'");
}

/// Label embedding g: one dense vector of dimension d per label.
class LabelEmbedding {
 public:
  LabelEmbedding() = default;
  LabelEmbedding(EmbeddingBackend backend, std::size_t alphabet, std::size_t dim,
                 std::vector<double> values)
      : backend_(backend), alphabet_(alphabet), dim_(dim), values_(std::move(values)) {
    if (values_.size() != alphabet_ * dim_)
      throw std::invalid_argument("LabelEmbedding: value count does not match alphabet x dim");
  }

  EmbeddingBackend backend() const noexcept { return backend_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> operator[](Label l) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(l) * dim_, dim_);
  }
  std::span<const double> values() const noexcept { return values_; }

  LabelEmbedding scaled(double c) const {
    auto v = values_;
    for (auto& x : v) x *= c;
    return LabelEmbedding(backend_, alphabet_, dim_, std::move(v));
  }

 private:
  EmbeddingBackend backend_ = EmbeddingBackend::onehot;
  std::size_t alphabet_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

inline LabelEmbedding one_hot_embedding(std::size_t alphabet_size) {
  if (alphabet_size == 0) throw std::invalid_argument("one_hot_embedding: empty alphabet");
  std::vector<double> v(alphabet_size * alphabet_size, 0.0);
  for (std::size_t i = 0; i < alphabet_size; ++i) v[i * alphabet_size + i] = 1.0;
  return LabelEmbedding(EmbeddingBackend::onehot, alphabet_size, alphabet_size, std::move(v));
}

struct SkipGramConfig {
  std::size_t dim = 32;
  std::size_t window = 5;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

/// Skip-gram with negative sampling over label sentences (word2vec recipe:
/// dynamic window, unigram^0.75 noise distribution, linearly decaying learning
/// rate, sentences shuffled every epoch). Single-threaded and deterministic
/// for a given seed.
inline LabelEmbedding train_skipgram(std::span<const std::span<const Label>> corpus,
                                     std::size_t alphabet_size, const SkipGramConfig& cfg) {
  if (corpus.empty()) throw std::invalid_argument("train_skipgram: empty corpus");
  if (cfg.dim == 0) throw std::invalid_argument("train_skipgram: dim must be >= 1");
  if (alphabet_size == 0) throw std::invalid_argument("train_skipgram: empty alphabet");
  const std::size_t d = cfg.dim;

  std::vector<double> counts(alphabet_size, 0.0);
  std::size_t total_tokens = 0;
  for (const auto& s : corpus)
    for (Label l : s) {
      if (l >= alphabet_size)
        throw std::invalid_argument("train_skipgram: token " + std::to_string(l) +
                                    " outside alphabet of size " + std::to_string(alphabet_size));
      counts[l] += 1.0;
      ++total_tokens;
    }

  // Cumulative unigram^0.75 distribution for negative draws.
  std::vector<double> noise_cdf(alphabet_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < alphabet_size; ++i) noise_cdf[i] = acc += std::pow(counts[i], 0.75);
  for (auto& c : noise_cdf) c /= acc;

  Rng rng(cfg.seed);
  std::vector<double> in(alphabet_size * d), out(alphabet_size * d, 0.0);
  for (auto& w : in) w = (rng.uniform() - 0.5) / static_cast<double>(d);

  auto draw_negative = [&] {
    const double u = rng.uniform();
    const auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), u);
    return static_cast<Label>(std::min<std::size_t>(it - noise_cdf.begin(), alphabet_size - 1));
  };
  auto sigmoid = [](double x) {
    if (x > 20.0) return 1.0;
    if (x < -20.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
  };

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> grad(d);
  const double schedule = static_cast<double>(cfg.epochs * total_tokens) + 1.0;
  std::size_t processed = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t si : order) {
      const auto& s = corpus[si];
      for (std::size_t pos = 0; pos < s.size(); ++pos, ++processed) {
        const double lr = cfg.learning_rate *
                          std::max(1e-4, 1.0 - static_cast<double>(processed) / schedule);
        const Label center = s[pos];
        const std::size_t reduce = cfg.window > 0 ? rng.below(cfg.window) : 0;
        const std::size_t span = cfg.window - reduce;
        const std::size_t lo = pos >= span ? pos - span : 0;
        const std::size_t hi = std::min(s.size() - 1, pos + span);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          // Context word's input vector predicts the centre word.
          double* v = &in[static_cast<std::size_t>(s[c]) * d];
          std::fill(grad.begin(), grad.end(), 0.0);
          for (std::size_t k = 0; k <= cfg.negatives; ++k) {
            Label target = center;
            double label = 1.0;
            if (k > 0) {
              target = draw_negative();
              if (target == center) continue;
              label = 0.0;
            }
            double* o = &out[static_cast<std::size_t>(target) * d];
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += v[j] * o[j];
            const double g = (label - sigmoid(dot)) * lr;
            for (std::size_t j = 0; j < d; ++j) {
              grad[j] += g * o[j];
              o[j] += g * v[j];
            }
          }
          for (std::size_t j = 0; j < d; ++j) v[j] += grad[j];
        }
      }
    }
  }
  return LabelEmbedding(EmbeddingBackend::skipgram, alphabet_size, d, std::move(in));
}

/// Deep slice embeddings for hops 0..H: row-major (rows x dim) matrix per hop.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t hops, std::size_t rows, std::size_t dim, double alpha)
      : rows_(rows), dim_(dim), alpha_(alpha), data_(hops, std::vector<double>(rows * dim, 0.0)) {}

  std::size_t hop_count() const noexcept { return data_.size(); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  double alpha() const noexcept { return alpha_; }

  std::span<const double> hop(std::size_t h) const { return data_[h]; }
  std::span<double> hop(std::size_t h) { return data_[h]; }
  std::span<const double> row(std::size_t h, std::size_t r) const {
    return std::span<const double>(data_[h]).subspan(r * dim_, dim_);
  }
  std::span<double> row(std::size_t h, std::size_t r) {
    return std::span<double>(data_[h]).subspan(r * dim_, dim_);
  }

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  double alpha_ = 0.0;
  std::vector<std::vector<double>> data_;
};

/// x[0] = raw[0]; x[h] = alpha * x[h-1] + raw[h], where raw[h](v) sums the
/// label embeddings of every token of v's hop-h slice. Empty slices contribute
/// the zero vector.
inline EmbeddingTable build_embedding_table(const SliceTable& slices, const LabelEmbedding& g,
                                            double alpha, std::size_t max_hop) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("build_embedding_table: alpha must lie in [0, 1]");
  if (max_hop + 1 > slices.hop_count())
    throw std::invalid_argument("build_embedding_table: slice table covers only " +
                                std::to_string(slices.hop_count()) + " hops");
  const std::size_t d = g.dim();
  EmbeddingTable table(max_hop + 1, slices.rows(), d, alpha);
  for (std::size_t h = 0; h <= max_hop; ++h) {
    for (std::size_t r = 0; r < slices.rows(); ++r) {
      auto x = table.row(h, r);
      for (Label l : slices.tokens(h, r)) {
        if (l >= g.alphabet_size())
          throw std::invalid_argument("build_embedding_table: label " + std::to_string(l) +
                                      " has no embedding (alphabet " +
                                      std::to_string(g.alphabet_size()) + ")");
        const auto e = g[l];
        for (std::size_t j = 0; j < d; ++j) x[j] += e[j];
      }
      if (h > 0) {
        const auto prev = table.row(h - 1, r);
        for (std::size_t j = 0; j < d; ++j) x[j] = alpha * prev[j] + x[j];
      }
    }
  }
  return table;
}

/// Text cache of an embedding table. The first line carries the cache key; the
/// rest are "hop,row,v0,...,v{d-1}" with round-trip precision.
inline void save_embedding_table(const EmbeddingTable& t, const std::string& key,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embedding cache " + path);
  out << "# key=" << key << " hops=" << t.hop_count() << " rows=" << t.rows() << " dim=" << t.dim()
      << " alpha=" << std::setprecision(17) << t.alpha() << '\n';
  for (std::size_t h = 0; h < t.hop_count(); ++h)
    for (std::size_t r = 0; r < t.rows(); ++r) {
      out << h << ',' << r;
      for (double v : t.row(h, r)) out << ',' << v;
      out << '\n';
    }
}

/// Loads a cache written by save_embedding_table; throws if the key differs.
inline EmbeddingTable load_embedding_table(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embedding cache " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string hash, kv;
  std::size_t hops = 0, rows = 0, dim = 0;
  double alpha = 0.0;
  hs >> hash;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const auto name = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (name == "key" && value != key)
      throw std::runtime_error("embedding cache " + path + " was built for a different config");
    if (name == "hops") hops = std::stoul(value);
    if (name == "rows") rows = std::stoul(value);
    if (name == "dim") dim = std::stoul(value);
    if (name == "alpha") alpha = std::stod(value);
  }
  if (header.find("key=" + key + " ") == std::string::npos)
    throw std::runtime_error("embedding cache " + path + " has no matching key");
  EmbeddingTable t(hops, rows, dim, alpha);
  std::string line;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    const auto h = std::stoul(cell);
    std::getline(ls, cell, ',');
    const auto r = std::stoul(cell);
    if (h >= hops || r >= rows) throw std::runtime_error("embedding cache row out of range");
    auto x = t.row(h, r);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::getline(ls, cell, ',')) throw std::runtime_error("embedding cache row too short");
      x[j] = std::stod(cell);
    }
    ++seen;
  }
  if (seen != hops * rows) throw std::runtime_error("embedding cache " + path + " is truncated");
  return t;
}

}  // namespace dhgak
