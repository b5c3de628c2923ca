// dhgak: command-line front end for the hierarchical graph alignment kernel.
//
//   dhgak stats    --dataset MUTAG
//   dhgak encode   --dataset MUTAG -b 1 -H 3
//   dhgak kernel   --dataset MUTAG -b 1 -H 3 --alpha 0.6 --cluster-factor 0.5 -T 3 --seed 42
//   dhgak evaluate --dataset MUTAG ... | --gram out/MUTAG/<hash>/gram.csv
//   dhgak grid     --dataset MUTAG
//
// Exit codes: 0 success, 1 user error, 2 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dhgak/dhgak.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  dhgak::RunConfig cfg;
  std::string config_file;
  std::string backend = "word2vec";
  std::vector<std::string> clustering{"kmeans"};
  bool no_hop_zero = false;
  long long corpus_max_hop = -1;
  std::size_t jobs = dhgak::default_jobs();
};

void add_dataset_options(CLI::App* app, Options& o) {
  app->add_option("--dataset,-d", o.cfg.dataset, "Dataset name (TU layout <dir>/<name>/<name>_A.txt)");
  app->add_option("--data-dir", o.cfg.data_dir,
                  "Dataset root; defaults to $DHGAK_DATA or the current directory");
}

void add_kernel_options(CLI::App* app, Options& o) {
  add_dataset_options(app, o);
  app->add_option("--config", o.config_file, "key=value RunConfig file; flags override it");
  app->add_option("-b,--width", o.cfg.width, "Slice width b");
  app->add_option("-H,--max-hop", o.cfg.max_hop, "Maximum hop H");
  app->add_option("--alpha", o.cfg.alpha, "Decay coefficient in [0,1]");
  app->add_option("--cluster-factor", o.cfg.cluster_factor, "k = max(2, round(N * factor))");
  app->add_option("-T,--experiments", o.cfg.experiments, "Clustering repetitions per method");
  app->add_option("--seed", o.cfg.seed, "Master seed");
  app->add_option("--backend", o.backend, "Label embedding: word2vec | onehot");
  app->add_option("--dim", o.cfg.dim, "Skip-gram embedding dimension");
  app->add_option("--window", o.cfg.window, "Skip-gram window");
  app->add_option("--epochs", o.cfg.epochs, "Skip-gram epochs");
  app->add_option("--negatives", o.cfg.negatives, "Negative samples per pair");
  app->add_option("--lr", o.cfg.learning_rate, "Initial skip-gram learning rate");
  app->add_option("--corpus-max-hop", o.corpus_max_hop,
                  "Highest hop feeding the skip-gram corpus (default H)");
  app->add_option("--clustering", o.clustering,
                  "Clustering methods: kmeans | dbscan[:eps=E,min_pts=M] | oracle")
      ->delimiter(',');
  app->add_flag("--no-hop-zero", o.no_hop_zero, "Sum hops 1..H only");
  app->add_option("--out,-o", o.cfg.output_dir, "Output/cache root");
  app->add_option("--jobs,-j", o.jobs, "Worker threads");
}

// Applies the config file first, then explicitly given flags on top.
dhgak::RunConfig resolve_config(CLI::App* app, const Options& o) {
  dhgak::RunConfig cfg = o.cfg;
  if (!o.config_file.empty()) {
    cfg = dhgak::load_run_config(o.config_file);
    auto given = [&](const char* name) { return app->count(name) > 0; };
    if (given("--dataset")) cfg.dataset = o.cfg.dataset;
    if (given("--data-dir")) cfg.data_dir = o.cfg.data_dir;
    if (given("--width")) cfg.width = o.cfg.width;
    if (given("--max-hop")) cfg.max_hop = o.cfg.max_hop;
    if (given("--alpha")) cfg.alpha = o.cfg.alpha;
    if (given("--cluster-factor")) cfg.cluster_factor = o.cfg.cluster_factor;
    if (given("--experiments")) cfg.experiments = o.cfg.experiments;
    if (given("--seed")) cfg.seed = o.cfg.seed;
    if (given("--dim")) cfg.dim = o.cfg.dim;
    if (given("--window")) cfg.window = o.cfg.window;
    if (given("--epochs")) cfg.epochs = o.cfg.epochs;
    if (given("--negatives")) cfg.negatives = o.cfg.negatives;
    if (given("--lr")) cfg.learning_rate = o.cfg.learning_rate;
    if (given("--out")) cfg.output_dir = o.cfg.output_dir;
    if (given("--backend")) cfg.backend = dhgak::parse_backend(o.backend);
    if (given("--no-hop-zero")) cfg.include_hop_zero = false;
    if (given("--corpus-max-hop")) cfg.corpus_max_hop = static_cast<std::size_t>(o.corpus_max_hop);
    if (given("--clustering")) {
      cfg.methods.clear();
      for (const auto& m : o.clustering) cfg.methods.push_back(dhgak::parse_clustering_method(m));
    }
  } else {
    cfg.backend = dhgak::parse_backend(o.backend);
    cfg.include_hop_zero = !o.no_hop_zero;
    if (o.corpus_max_hop >= 0) cfg.corpus_max_hop = static_cast<std::size_t>(o.corpus_max_hop);
    cfg.methods.clear();
    for (const auto& m : o.clustering) cfg.methods.push_back(dhgak::parse_clustering_method(m));
  }
  if (cfg.corpus_max_hop == cfg.max_hop) cfg.corpus_max_hop.reset();
  if (cfg.data_dir.empty())
    if (const char* env = std::getenv("DHGAK_DATA")) cfg.data_dir = env;
  if (cfg.dataset.empty()) throw UserError("--dataset is required");
  cfg.validate();
  return cfg;
}

dhgak::Dataset load_dataset(const std::string& root, const std::string& name) {
  const fs::path base = root.empty() ? fs::path(".") : fs::path(root);
  const fs::path nested = base / name;
  const fs::path dir = fs::exists(nested / (name + "_A.txt")) ? nested : base;
  return dhgak::load_tu_dataset(dir, name);
}

fs::path run_dir(const dhgak::RunConfig& cfg) {
  return fs::path(cfg.output_dir) / cfg.dataset / dhgak::config_hash(cfg);
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

ordered_json report_json(const dhgak::CvReport& r, const std::string& config_text) {
  ordered_json j;
  ordered_json cfg = ordered_json::object();
  std::istringstream lines(config_text);
  for (std::string line; std::getline(lines, line);)
    if (auto eq = line.find('='); eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 1);
  j["config"] = cfg;
  j["config_hash"] = dhgak::fnv1a_hex(config_text);
  j["folds"] = r.folds;
  j["per_fold_acc"] = r.fold_accuracy;
  j["mean"] = r.mean;
  j["std"] = r.std;
  j["chosen_C"] = r.chosen_c;
  j["train_accuracy"] = r.train_accuracy;
  j["mean_train_accuracy"] = r.mean_train_accuracy;
  j["warnings"] = r.warnings;
  return j;
}

ordered_json timings_json(const dhgak::StageTimings& t) {
  ordered_json j;
  j["encode"] = t.encode_seconds;
  j["embed"] = t.embed_seconds;
  j["cluster"] = t.cluster_seconds;
  j["gram"] = t.gram_seconds;
  return j;
}

struct KernelRun {
  dhgak::GramMatrix gram;
  dhgak::StageTimings timings;
  fs::path gram_path;
  bool cached = false;
};

// Computes (or reuses) the normalized Gram of a configuration and writes the
// run directory: run.cfg, gram.csv, gram.json, embeddings.csv, timings.json.
KernelRun run_kernel(const dhgak::Dataset& d, const dhgak::RunConfig& cfg, std::size_t jobs,
                     bool force, bool dump_maps) {
  KernelRun out;
  const auto dir = run_dir(cfg);
  out.gram_path = dir / "gram.csv";
  if (!force && fs::exists(out.gram_path) && fs::exists(dhgak::sidecar_path(out.gram_path))) {
    out.gram = dhgak::load_gram(out.gram_path, &cfg);
    out.cached = true;
    return out;
  }
  const auto emb_path = dir / "embeddings.csv";
  std::optional<dhgak::EmbeddingTable> cached;
  if (!force && fs::exists(emb_path)) {
    try {
      cached = dhgak::load_embedding_table(emb_path.string(), cfg.embedding_key());
    } catch (const std::exception& e) {
      std::cerr << "warning: ignoring embedding cache: " << e.what() << '\n';
    }
  }
  auto res = dhgak::compute_dhgak(d, cfg, jobs, cached ? &*cached : nullptr);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  fs::create_directories(dir);
  write_text(dir / "run.cfg", cfg.to_text());
  if (!cached) dhgak::save_embedding_table(res.embeddings, cfg.embedding_key(), emb_path.string());
  res.normalized.set_config_text(cfg.canonical());
  dhgak::save_gram(res.normalized, out.gram_path);
  if (dump_maps) {
    const auto cc = cfg.clustering(jobs);
    for (std::size_t h = cfg.include_hop_zero ? 0 : 1; h <= cfg.max_hop; ++h) {
      const dhgak::PointSet pts{res.embeddings.hop(h), res.embeddings.dim()};
      const auto map = dhgak::build_feature_map(pts, d.node_offsets(), cc, h);
      std::ofstream f(dir / ("feature_map_h" + std::to_string(h) + ".txt"));
      map.write_triplets(f);
    }
  }
  write_text(dir / "timings.json", timings_json(res.timings).dump(2) + "\n");
  out.gram = std::move(res.normalized);
  out.timings = res.timings;
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) v.push_back(std::stod(item));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep hierarchical graph alignment kernels"};
  app.require_subcommand(1);

  Options o;
  std::string encode_output;
  long long encode_hop = -1;
  bool with_source = false, force = false, dump_maps = false;
  std::string gram_path, report_path;
  std::size_t folds = 10, inner_folds = 5;
  long long cv_seed = -1;
  std::string widths = "0,1,2", hops = "1,3,5,7,9", alphas = "0,0.2,0.4,0.6,0.8,1";
  std::string factors;
  std::size_t factor_count = 10;

  auto* stats = app.add_subcommand("stats", "Print dataset statistics as JSON");
  add_dataset_options(stats, o);

  auto* encode = app.add_subcommand("encode", "Dump slice encodings, one token sequence per line");
  add_kernel_options(encode, o);
  encode->add_option("--hop", encode_hop, "Only this hop (default: all hops 0..H)");
  encode->add_option("--output", encode_output, "Write to a file instead of stdout");
  encode->add_flag("--with-source", with_source, "Prefix each line with 'graph node hop<TAB>'");

  auto* kernel = app.add_subcommand("kernel", "Compute the normalized Gram matrix");
  add_kernel_options(kernel, o);
  kernel->add_flag("--force", force, "Ignore cached artifacts");
  kernel->add_flag("--dump-feature-maps", dump_maps, "Also write per-hop feature map triplets");

  auto* evaluate = app.add_subcommand("evaluate", "10-fold C-SVM evaluation of a Gram matrix");
  add_kernel_options(evaluate, o);
  evaluate->add_option("--gram", gram_path, "Evaluate this Gram CSV (validated against its sidecar)");
  evaluate->add_option("--folds", folds, "Outer folds");
  evaluate->add_option("--inner-folds", inner_folds, "Inner folds used to pick C");
  evaluate->add_option("--cv-seed", cv_seed, "Fold seed (default: --seed)");
  evaluate->add_option("--report", report_path, "Report path (default: next to the Gram)");
  evaluate->add_flag("--force", force, "Ignore cached artifacts");

  auto* grid = app.add_subcommand("grid", "Grid search over b, H, alpha and cluster factor");
  add_kernel_options(grid, o);
  grid->add_option("--widths", widths, "Comma-separated b values");
  grid->add_option("--hops", hops, "Comma-separated H values");
  grid->add_option("--alphas", alphas, "Comma-separated alpha values");
  grid->add_option("--cluster-factors", factors, "Comma-separated factors (default: log grid)");
  grid->add_option("--cluster-factor-count", factor_count, "Points of the 0.1..2 log grid");
  grid->add_option("--folds", folds, "Outer folds");
  grid->add_option("--inner-folds", inner_folds, "Inner folds used to pick C");
  grid->add_option("--cv-seed", cv_seed, "Fold seed (default: --seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*stats) {
      if (o.cfg.data_dir.empty())
        if (const char* env = std::getenv("DHGAK_DATA")) o.cfg.data_dir = env;
      if (o.cfg.dataset.empty()) throw UserError("--dataset is required");
      const auto d = load_dataset(o.cfg.data_dir, o.cfg.dataset);
      const auto s = dhgak::graph_stats(d);
      ordered_json j;
      j["name"] = d.name();
      j["graphs"] = s.graph_count;
      j["classes"] = s.class_count;
      j["avg_nodes"] = s.avg_nodes;
      j["avg_edges"] = s.avg_edges;
      j["node_labels"] = s.label_alphabet_size;
      j["labels_from_degree"] = d.label_maps().node_labels_from_degree;
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*encode) {
      const auto cfg = resolve_config(encode, o);
      const auto d = load_dataset(cfg.data_dir, cfg.dataset);
      const auto table = dhgak::encode_dataset(d, {cfg.width, cfg.max_hop});
      std::ofstream file;
      if (!encode_output.empty()) {
        file.open(encode_output);
        if (!file) throw UserError("cannot write " + encode_output);
      }
      std::ostream& out = encode_output.empty() ? std::cout : file;
      for (std::size_t h = 0; h <= cfg.max_hop; ++h) {
        if (encode_hop >= 0 && static_cast<std::size_t>(encode_hop) != h) continue;
        for (std::size_t g = 0; g < d.size(); ++g)
          for (std::size_t v = 0; v < d[g].node_count(); ++v) {
            if (with_source) out << g << ' ' << v << ' ' << h << '\t';
            bool first = true;
            for (auto l : table.tokens(h, d.node_offset(g) + v)) {
              out << (first ? "" : " ") << l;
              first = false;
            }
            out << '\n';
          }
      }
      return 0;
    }

    if (*kernel) {
      const auto cfg = resolve_config(kernel, o);
      const auto d = load_dataset(cfg.data_dir, cfg.dataset);
      const auto run = run_kernel(d, cfg, o.jobs, force, dump_maps);
      std::cerr << (run.cached ? "reused " : "wrote ") << run.gram_path.string() << '\n';
      std::cout << run.gram_path.string() << '\n';
      return 0;
    }

    if (*evaluate) {
      dhgak::GramMatrix k;
      dhgak::RunConfig cfg;
      fs::path where;
      const auto start = std::chrono::steady_clock::now();
      if (!gram_path.empty()) {
        std::optional<dhgak::RunConfig> expected;
        if (!o.config_file.empty()) expected = resolve_config(evaluate, o);
        k = dhgak::load_gram(gram_path, expected ? &*expected : nullptr);
        cfg = dhgak::RunConfig::from_text(k.config_text());
        if (evaluate->count("--data-dir")) cfg.data_dir = o.cfg.data_dir;
        else if (const char* env = std::getenv("DHGAK_DATA")) cfg.data_dir = env;
        if (evaluate->count("--dataset") && o.cfg.dataset != cfg.dataset)
          throw dhgak::MetadataMismatch("Gram was built for dataset '" + cfg.dataset + "', not '" +
                                        o.cfg.dataset + "'");
        where = fs::path(gram_path).parent_path();
      } else {
        cfg = resolve_config(evaluate, o);
        const auto d = load_dataset(cfg.data_dir, cfg.dataset);
        k = run_kernel(d, cfg, o.jobs, force, false).gram;
        where = run_dir(cfg);
      }
      const auto d = load_dataset(cfg.data_dir, cfg.dataset);
      const auto labels = d.class_labels();
      if (labels.size() != k.size())
        throw dhgak::MetadataMismatch("Gram has " + std::to_string(k.size()) + " rows but dataset has " +
                                      std::to_string(labels.size()) + " graphs");
      dhgak::CvOptions cv;
      cv.folds = folds;
      cv.inner_folds = inner_folds;
      cv.seed = cv_seed >= 0 ? static_cast<std::uint64_t>(cv_seed) : cfg.seed;
      cv.jobs = o.jobs;
      const auto rep = dhgak::cross_validate(k, labels, cv);
      auto j = report_json(rep, k.config_text());
      j["wall_times"] = {{"evaluate_seconds",
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
      const fs::path out = report_path.empty() ? where / "report.json" : fs::path(report_path);
      write_text(out, j.dump(2) + "\n");
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*grid) {
      auto cfg = resolve_config(grid, o);
      const auto d = load_dataset(cfg.data_dir, cfg.dataset);
      dhgak::GridSpec spec;
      spec.widths.clear();
      for (double w : parse_list(widths)) spec.widths.push_back(static_cast<std::size_t>(w));
      spec.hops.clear();
      for (double h : parse_list(hops)) spec.hops.push_back(static_cast<std::size_t>(h));
      spec.alphas = parse_list(alphas);
      spec.cluster_factors = factors.empty() ? dhgak::log_spaced(0.1, 2.0, factor_count) : parse_list(factors);
      dhgak::CvOptions cv;
      cv.folds = folds;
      cv.inner_folds = inner_folds;
      cv.seed = cv_seed >= 0 ? static_cast<std::uint64_t>(cv_seed) : cfg.seed;
      cv.jobs = 1;

      std::ostringstream key;
      key << cfg.canonical() << "widths=" << widths << "\nhops=" << hops << "\nalphas=" << alphas;
      for (double f : spec.cluster_factors) key << ',' << f;
      key << "\nfolds=" << folds << "\ncv_seed=" << cv.seed << '\n';
      const auto dir = fs::path(cfg.output_dir) / cfg.dataset / ("grid-" + dhgak::fnv1a_hex(key.str()));
      fs::create_directories(dir);
      std::ofstream csv(dir / "grid.csv");
      csv << "b,H,alpha,cluster_factor,T,seed,backend,mean,std,config_hash\n";
      char buf[256];
      const auto result = dhgak::grid_search(
          d, spec, cfg, cv, o.jobs, [&](const dhgak::GridPoint& p, std::size_t done, std::size_t total) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%zu,%llu,%s,%.17g,%.17g,%s\n",
                          p.config.width, p.config.max_hop, p.config.alpha, p.config.cluster_factor,
                          p.config.experiments, static_cast<unsigned long long>(p.config.seed),
                          dhgak::to_string(p.config.backend), p.report.mean, p.report.std,
                          dhgak::config_hash(p.config).c_str());
            csv << buf << std::flush;
            std::cerr << "[" << done << "/" << total << "] b=" << p.config.width
                      << " H=" << p.config.max_hop << " alpha=" << p.config.alpha
                      << " cf=" << p.config.cluster_factor << " acc=" << p.report.mean << '\n';
          });
      const auto& best = result.best_point();
      auto j = report_json(best.report, best.config.canonical());
      write_text(dir / "best.json", j.dump(2) + "\n");
      write_text(dir / "best.cfg", best.config.to_text());
      std::cout << j.dump(2) << '\n';
      std::cerr << "results: " << (dir / "grid.csv").string() << '\n';
      return 0;
    }
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const dhgak::DatasetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const dhgak::MetadataMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
