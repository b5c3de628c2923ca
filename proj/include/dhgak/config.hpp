#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alignment.hpp"
#include "format.hpp"
#include "embedder.hpp"

namespace dhgak {

/// Everything that determines a kernel run, serialisable as key=value lines.
struct RunConfig {
  std::string dataset;
  std::string data_dir;
  std::size_t width = 1;         // b
  std::size_t max_hop = 3;       // H
  double alpha = 0.6;
  double cluster_factor = 1.0;
  std::size_t experiments = 3;   // T
  std::uint64_t seed = 42;
  EmbeddingBackend backend = EmbeddingBackend::skipgram;
  std::size_t dim = 32;
  std::size_t window = 5;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double learning_rate = 0.025;
  std::vector<ClusteringMethod> methods{KMeansMethod{}};
  bool include_hop_zero = true;
  // Highest hop whose slices feed the skip-gram corpus; defaults to max_hop.
  std::optional<std::size_t> corpus_max_hop;
  std::string output_dir = "dhgak-out";

  std::size_t corpus_hop() const { return corpus_max_hop.value_or(max_hop); }

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(cluster_factor > 0.0)) throw std::invalid_argument("cluster_factor must be > 0");
    if (experiments == 0) throw std::invalid_argument("T must be >= 1");
    if (dim == 0) throw std::invalid_argument("dim must be >= 1");
    if (methods.empty()) throw std::invalid_argument("at least one clustering method is required");
    if (!include_hop_zero && max_hop == 0)
      throw std::invalid_argument("H must be >= 1 when hop 0 is excluded");
    if (corpus_max_hop && *corpus_max_hop < max_hop)
      throw std::invalid_argument("corpus_max_hop must be >= H");
  }

  /// Canonical text of the fields that influence the Gram matrix.
  std::string canonical() const {
    std::ostringstream s;
    const auto real = format_real;
    s << "dataset=" << dataset << '\n'
      << "b=" << width << '\n'
      << "H=" << max_hop << '\n'
      << "alpha=" << real(alpha) << '\n'
      << "cluster_factor=" << real(cluster_factor) << '\n'
      << "T=" << experiments << '\n'
      << "seed=" << seed << '\n'
      << "backend=" << to_string(backend) << '\n';
    if (backend == EmbeddingBackend::skipgram)
      s << "dim=" << dim << '\n'
        << "window=" << window << '\n'
        << "epochs=" << epochs << '\n'
        << "negatives=" << negatives << '\n'
        << "learning_rate=" << real(learning_rate) << '\n'
        << "corpus_max_hop=" << corpus_hop() << '\n';
    s << "clustering=";
    for (std::size_t i = 0; i < methods.size(); ++i) s << (i ? ";" : "") << to_string(methods[i]);
    s << '\n' << "include_hop_zero=" << (include_hop_zero ? 1 : 0) << '\n';
    return s.str();
  }

  /// Key of the cached embedding table (dataset, b, H, alpha, backend, seed).
  std::string embedding_key() const {
    std::ostringstream s;
    s << dataset << ";b=" << width << ";H=" << max_hop << ";alpha=" << format_real(alpha)
      << ";backend=" << to_string(backend) << ";seed=" << seed;
    if (backend == EmbeddingBackend::skipgram)
      s << ";dim=" << dim << ";window=" << window << ";epochs=" << epochs
        << ";negatives=" << negatives << ";lr=" << format_real(learning_rate)
        << ";corpus=" << corpus_hop();
    return s.str();
  }

  /// Full key=value form, including paths.
  std::string to_text() const {
    std::string out = canonical();
    out += "data_dir=" + data_dir + "\n";
    out += "output_dir=" + output_dir + "\n";
    return out;
  }

  static RunConfig from_text(const std::string& text) {
    RunConfig c;
    c.methods.clear();
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    bool corpus_seen = false;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(n) + ": expected key=value");
      const auto key = line.substr(0, eq), value = line.substr(eq + 1);
      try {
        if (key == "dataset") c.dataset = value;
        else if (key == "data_dir") c.data_dir = value;
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "b") c.width = std::stoul(value);
        else if (key == "H") c.max_hop = std::stoul(value);
        else if (key == "alpha") c.alpha = std::stod(value);
        else if (key == "cluster_factor") c.cluster_factor = std::stod(value);
        else if (key == "T") c.experiments = std::stoul(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "backend") c.backend = parse_backend(value);
        else if (key == "dim") c.dim = std::stoul(value);
        else if (key == "window") c.window = std::stoul(value);
        else if (key == "epochs") c.epochs = std::stoul(value);
        else if (key == "negatives") c.negatives = std::stoul(value);
        else if (key == "learning_rate") c.learning_rate = std::stod(value);
        else if (key == "corpus_max_hop") c.corpus_max_hop = std::stoul(value), corpus_seen = true;
        else if (key == "include_hop_zero") c.include_hop_zero = value == "1" || value == "true";
        else if (key == "clustering") {
          std::size_t pos = 0;
          while (pos <= value.size()) {
            auto end = value.find(';', pos);
            if (end == std::string::npos) end = value.size();
            if (end > pos) c.methods.push_back(parse_clustering_method(value.substr(pos, end - pos)));
            pos = end + 1;
          }
        } else {
          throw std::invalid_argument("unknown key '" + key + "'");
        }
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config line " + std::to_string(n) + ": " + e.what());
      } catch (const std::out_of_range&) {
        throw std::invalid_argument("config line " + std::to_string(n) + ": value out of range");
      }
    }
    if (c.methods.empty()) c.methods.push_back(KMeansMethod{});
    if (corpus_seen && c.corpus_max_hop == c.max_hop) c.corpus_max_hop.reset();
    return c;
  }

  ClusteringConfig clustering(std::size_t jobs = 1) const {
    ClusteringConfig cc;
    cc.methods = methods;
    cc.experiments = experiments;
    cc.cluster_factor = cluster_factor;
    cc.seed = seed;
    cc.jobs = jobs;
    return cc;
  }

  SkipGramConfig skipgram() const {
    SkipGramConfig s;
    s.dim = dim;
    s.window = window;
    s.epochs = epochs;
    s.negatives = negatives;
    s.learning_rate = learning_rate;
    s.seed = derive_seed(seed, {static_cast<std::uint64_t>(SeedStream::skipgram)});
    return s;
  }
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string config_hash(const RunConfig& c) { return fnv1a_hex(c.canonical()); }

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return RunConfig::from_text(ss.str());
}

}  // namespace dhgak
