#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "dhgak/dhgak.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(DHGAK_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small two-class dataset written in TU layout under <root>/CLI.
fs::path make_dataset(const fs::path& root) {
  std::vector<dhgak::Graph> gs;
  for (int i = 0; i < 24; ++i) {
    const int cls = i % 2;
    const dhgak::NodeId n = 5 + static_cast<dhgak::NodeId>(i % 4);
    std::vector<std::pair<dhgak::NodeId, dhgak::NodeId>> edges;
    for (dhgak::NodeId v = 1; v < n; ++v) edges.emplace_back(cls ? 0 : v - 1, v);
    std::vector<dhgak::Label> labels(n);
    for (dhgak::NodeId v = 0; v < n; ++v) labels[v] = static_cast<dhgak::Label>((v + static_cast<dhgak::NodeId>(cls)) % 3);
    gs.push_back(dhgak::Graph::from_edges(n, edges, labels, cls));
  }
  dhgak::write_tu_dataset(dhgak::Dataset::from_graphs("CLI", std::move(gs)), root / "CLI");
  return root;
}

}  // namespace

TEST_CASE("command line interface") {
  const auto root = fs::temp_directory_path() / ("dhgak-cli-" + std::to_string(::getpid()));
  fs::remove_all(root);
  make_dataset(root / "data");
  const auto out = root / "out";
  const std::string common = "--dataset CLI --data-dir " + (root / "data").string() + " --out " + out.string();
  const std::string kparams = " -b 1 -H 2 --alpha 0.4 --cluster-factor 0.5 -T 2 --seed 7 --dim 8 --epochs 2 -j 1";

  SECTION("stats") {
    const auto r = run("stats --dataset CLI --data-dir " + (root / "data").string());
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["graphs"] == 24);
    CHECK(j["classes"] == 2);
    CHECK(j["avg_nodes"].get<double>() == Catch::Approx(6.5));
  }

  SECTION("encode prints one sequence per slice") {
    const auto r = run("encode " + common + " -b 0 -H 0");
    REQUIRE(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 156);
    const auto one = run("encode " + common + " -b 1 -H 2 --hop 1 --with-source");
    REQUIRE(one.code == 0);
    CHECK(one.out.rfind("0 0 1\t", 0) == 0);
  }

  SECTION("kernel, cache reuse and evaluation") {
    const auto k1 = run("kernel " + common + kparams);
    REQUIRE(k1.code == 0);
    const fs::path gram = k1.out.substr(0, k1.out.find('\n'));
    REQUIRE(fs::exists(gram));
    CHECK(fs::exists(gram.parent_path() / "gram.json"));
    CHECK(fs::exists(gram.parent_path() / "run.cfg"));
    CHECK(fs::exists(gram.parent_path() / "embeddings.csv"));
    const auto bytes = slurp(gram);

    // forced recomputation is byte-identical
    REQUIRE(run("kernel " + common + kparams + " --force").code == 0);
    CHECK(slurp(gram) == bytes);
    // recomputation from the cached embeddings as well
    fs::remove(gram);
    REQUIRE(run("kernel " + common + kparams).code == 0);
    CHECK(slurp(gram) == bytes);

    const auto e = run("evaluate " + common + kparams);
    REQUIRE(e.code == 0);
    const auto rep = nlohmann::json::parse(e.out);
    CHECK(rep["per_fold_acc"].size() == 10);
    CHECK(rep["chosen_C"].size() == 10);
    CHECK(rep["config"]["b"] == "1");
    CHECK(rep["config"]["alpha"] == "0.4");
    CHECK(rep["mean"].get<double>() > 0.8);

    const auto g = run("evaluate --gram " + gram.string() + " --data-dir " + (root / "data").string());
    REQUIRE(g.code == 0);
    CHECK(nlohmann::json::parse(g.out)["per_fold_acc"] == rep["per_fold_acc"]);

    // a Gram evaluated against a different configuration is refused
    const auto cfg_file = root / "other.cfg";
    std::ofstream(cfg_file) << "dataset=CLI\nb=2\nH=2\n";
    const auto bad = run("evaluate --gram " + gram.string() + " --config " + cfg_file.string() +
                         " --data-dir " + (root / "data").string());
    CHECK(bad.code == 1);
    const auto wrong = run("evaluate --gram " + gram.string() + " --dataset OTHER --data-dir " +
                           (root / "data").string());
    CHECK(wrong.code == 1);
  }

  SECTION("config file with flag overrides") {
    const auto cfg_file = root / "run.cfg";
    std::ofstream(cfg_file) << "dataset=CLI\nb=1\nH=1\nalpha=0.2\nT=1\ndim=4\nepochs=1\n";
    const auto r = run("kernel --config " + cfg_file.string() + " --data-dir " + (root / "data").string() +
                       " --out " + out.string() + " --alpha 0.8");
    REQUIRE(r.code == 0);
    const fs::path gram = r.out.substr(0, r.out.find('\n'));
    const auto recorded = dhgak::load_run_config((gram.parent_path() / "run.cfg").string());
    CHECK(recorded.alpha == 0.8);
    CHECK(recorded.max_hop == 1);
  }

  SECTION("small grid") {
    const auto r = run("grid " + common + " --widths 1 --hops 1,2 --alphas 0.5 --cluster-factors 0.3 -T 1 --dim 4 --epochs 1");
    REQUIRE(r.code == 0);
    const auto best = nlohmann::json::parse(r.out);
    CHECK(best.contains("mean"));
    bool found = false;
    for (const auto& e : fs::recursive_directory_iterator(out))
      if (e.path().filename() == "grid.csv") {
        found = true;
        const auto text = slurp(e.path());
        CHECK(std::count(text.begin(), text.end(), '\n') == 3);
      }
    CHECK(found);
  }

  SECTION("user errors exit with 1") {
    CHECK(run("kernel --dataset NOPE --data-dir " + (root / "data").string()).code == 1);
    CHECK(run("kernel " + common + " --alpha 2").code == 1);
    CHECK(run("kernel " + common + " --clustering spectral").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("kernel").code == 1);
    CHECK(run("--help").code == 0);
  }
  fs::remove_all(root);
}
