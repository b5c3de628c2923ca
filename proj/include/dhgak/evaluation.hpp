#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "svm.hpp"

namespace dhgak {

/// {1e-3, 1e-2, ..., 1e4}
inline std::vector<double> default_c_grid() {
  std::vector<double> c;
  for (int e = -3; e <= 4; ++e) c.push_back(std::pow(10.0, e));
  return c;
}

/// `count` points from lo to hi, evenly spaced on a log scale (both ends included).
inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> v(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

struct FoldAssignment {
  std::vector<std::size_t> fold;  // fold id per sample
  std::size_t folds = 0;          // effective number of folds
  std::vector<std::string> warnings;
};

/// Stratified folds: each class is shuffled (seeded), the classes are
/// concatenated and dealt round-robin, so fold sizes differ by at most one and
/// class proportions are preserved. If some class has fewer members than
/// `folds`, the fold count is reduced to that size (never below 2) with a
/// warning.
inline FoldAssignment stratified_folds(std::span<const int> labels, std::size_t folds,
                                       std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
  if (labels.size() < 2) throw std::invalid_argument("stratified_folds: need at least 2 samples");
  FoldAssignment out;
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::size_t smallest = labels.size();
  for (const auto& [c, members] : by_class) smallest = std::min(smallest, members.size());
  std::size_t k = std::min(folds, labels.size());
  if (smallest < k) {
    const std::size_t reduced = std::max<std::size_t>(2, smallest);
    out.warnings.push_back("a class has only " + std::to_string(smallest) + " members; using " +
                           std::to_string(std::min(k, reduced)) + " folds instead of " +
                           std::to_string(folds));
    k = std::min(k, reduced);
  }
  out.folds = k;
  out.fold.resize(labels.size());
  Rng rng(seed);
  std::size_t pos = 0;
  for (auto& [c, members] : by_class) {
    rng.shuffle(members.begin(), members.end());
    for (auto i : members) out.fold[i] = pos++ % k;
  }
  return out;
}

namespace evaluation_detail {

inline std::vector<double> submatrix(const GramMatrix& k, std::span<const std::size_t> idx) {
  std::vector<double> sub(idx.size() * idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) sub[r * idx.size() + c] = k(idx[r], idx[c]);
  return sub;
}

/// Number of correct predictions on `test` of a model trained on `train`.
inline std::size_t fit_and_score(const GramMatrix& k, std::span<const int> labels,
                                 std::span<const std::size_t> train,
                                 std::span<const std::size_t> test, double C,
                                 const SvmOptions& opt) {
  std::vector<int> y;
  y.reserve(train.size());
  for (auto i : train) y.push_back(labels[i]);
  const MulticlassSvm svm(submatrix(k, train), y, C, opt);
  std::size_t correct = 0;
  for (auto x : test)
    correct += svm.predict([&](std::size_t t) { return k(train[t], x); }) == labels[x];
  return correct;
}

}  // namespace evaluation_detail

struct CvOptions {
  std::size_t folds = 10;
  std::size_t inner_folds = 5;
  std::vector<double> c_grid = default_c_grid();
  std::uint64_t seed = 0;
  SvmOptions svm;
  std::size_t jobs = 1;
};

struct CvReport {
  std::vector<double> fold_accuracy;
  std::vector<double> chosen_c;
  std::vector<double> train_accuracy;  // final model on its own training split
  double mean = 0.0;
  double std = 0.0;                    // population standard deviation over folds
  double mean_train_accuracy = 0.0;
  std::size_t folds = 0;
  std::vector<std::string> warnings;
  std::string config_text;
};

inline double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Stratified k-fold C-SVM evaluation of a precomputed kernel. For every outer
/// fold, C is picked from `c_grid` by stratified inner cross-validation on the
/// training split (pooled accuracy; ties go to the smaller C), then a model
/// trained on the whole training split is scored on the held-out fold.
inline CvReport cross_validate(const GramMatrix& k, std::span<const int> labels,
                               const CvOptions& opt = {}) {
  using evaluation_detail::fit_and_score;
  if (labels.size() != k.size())
    throw std::invalid_argument("cross_validate: " + std::to_string(labels.size()) +
                                " labels for a " + std::to_string(k.size()) + "-graph kernel");
  if (opt.c_grid.empty()) throw std::invalid_argument("cross_validate: empty C grid");

  CvReport rep;
  rep.config_text = k.config_text();
  const auto outer = stratified_folds(labels, opt.folds, derive_seed(opt.seed, {static_cast<std::uint64_t>(SeedStream::folds)}));
  rep.folds = outer.folds;
  rep.warnings = outer.warnings;
  rep.fold_accuracy.resize(outer.folds);
  rep.chosen_c.resize(outer.folds);
  rep.train_accuracy.resize(outer.folds);
  std::vector<std::vector<std::string>> fold_warnings(outer.folds);

  parallel_for(outer.folds, opt.jobs, [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) (outer.fold[i] == f ? test : train).push_back(i);
    std::vector<int> train_labels;
    for (auto i : train) train_labels.push_back(labels[i]);

    double best_c = opt.c_grid.front();
    if (opt.c_grid.size() > 1) {
      const auto inner = stratified_folds(
          train_labels, opt.inner_folds,
          derive_seed(opt.seed, {static_cast<std::uint64_t>(SeedStream::inner_folds), f}));
      fold_warnings[f] = inner.warnings;
      std::vector<std::vector<std::size_t>> in_train(inner.folds), in_test(inner.folds);
      for (std::size_t q = 0; q < inner.folds; ++q)
        for (std::size_t t = 0; t < train.size(); ++t)
          (inner.fold[t] == q ? in_test[q] : in_train[q]).push_back(train[t]);
      std::size_t best_correct = 0;
      bool first = true;
      for (double C : opt.c_grid) {
        std::size_t correct = 0;
        for (std::size_t q = 0; q < inner.folds; ++q)
          correct += fit_and_score(k, labels, in_train[q], in_test[q], C, opt.svm);
        if (first || correct > best_correct) best_correct = correct, best_c = C, first = false;
      }
    }
    rep.chosen_c[f] = best_c;
    rep.fold_accuracy[f] = test.empty() ? 0.0
        : static_cast<double>(fit_and_score(k, labels, train, test, best_c, opt.svm)) /
              static_cast<double>(test.size());
    rep.train_accuracy[f] = static_cast<double>(fit_and_score(k, labels, train, train, best_c, opt.svm)) /
                            static_cast<double>(train.size());
  });
  for (auto& w : fold_warnings) rep.warnings.insert(rep.warnings.end(), w.begin(), w.end());
  rep.mean = mean_of(rep.fold_accuracy);
  rep.std = population_std(rep.fold_accuracy);
  rep.mean_train_accuracy = mean_of(rep.train_accuracy);
  return rep;
}

/// Parameter ranges of the hyper-parameter sweep (T stays fixed).
struct GridSpec {
  std::vector<std::size_t> widths{0, 1, 2};
  std::vector<std::size_t> hops{1, 3, 5, 7, 9};
  std::vector<double> alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> cluster_factors = log_spaced(0.1, 2.0, 10);

  std::size_t size() const {
    return widths.size() * hops.size() * alphas.size() * cluster_factors.size();
  }
};

struct GridPoint {
  RunConfig config;
  CvReport report;
};

struct GridResult {
  std::vector<GridPoint> points;
  std::size_t best = 0;

  const GridPoint& best_point() const { return points.at(best); }
};

/// Index of the best point: highest mean accuracy, then lower std, then smaller
/// H, then earlier position.
inline std::size_t select_best(std::span<const GridPoint> points) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i].report;
    const auto& b = points[best].report;
    if (a.mean != b.mean) {
      if (a.mean > b.mean) best = i;
    } else if (a.std != b.std) {
      if (a.std < b.std) best = i;
    } else if (points[i].config.max_hop < points[best].config.max_hop) {
      best = i;
    }
  }
  return best;
}

using GridProgress = std::function<void(const GridPoint&, std::size_t done, std::size_t total)>;

/// Cross-validates every grid point. The skip-gram corpus of every point spans
/// hops 0..max(spec.hops), so one label embedding per width serves all points
/// and per-hop Gram matrices are shared across H; each point's Gram is
/// identical to compute_dhgak on its recorded RunConfig.
inline GridResult grid_search(const Dataset& d, const GridSpec& spec, const RunConfig& base,
                              const CvOptions& cv, std::size_t jobs = 1,
                              const GridProgress& progress = {}) {
  if (spec.size() == 0) throw std::invalid_argument("grid_search: empty grid");
  const std::size_t hmax = *std::max_element(spec.hops.begin(), spec.hops.end());
  const auto labels = d.class_labels();
  GridResult result;
  result.points.reserve(spec.size());
  const std::size_t total = spec.size();

  for (std::size_t b : spec.widths) {
    RunConfig cfg = base;
    cfg.width = b;
    cfg.max_hop = hmax;
    cfg.corpus_max_hop = hmax;
    const auto slices = encode_dataset(d, SliceSpec{b, hmax});
    const auto g = label_embedding_for(d, slices, cfg);
    for (double alpha : spec.alphas) {
      const auto table = build_embedding_table(slices, g, alpha, hmax);
      for (double cf : spec.cluster_factors) {
        cfg.alpha = alpha;
        cfg.cluster_factor = cf;
        const auto cc = cfg.clustering(jobs);
        std::vector<GramMatrix> per_hop;
        for (std::size_t h = 0; h <= hmax; ++h) per_hop.push_back(hop_gram(d, table, h, cc));

        std::vector<GridPoint> batch(spec.hops.size());
        for (std::size_t hi = 0; hi < spec.hops.size(); ++hi) {
          batch[hi].config = cfg;
          batch[hi].config.max_hop = spec.hops[hi];
        }
        parallel_for(batch.size(), jobs, [&](std::size_t hi) {
          auto& pt = batch[hi];
          const std::size_t first = pt.config.include_hop_zero ? 0 : 1;
          const auto text = pt.config.canonical();
          std::vector<GramMatrix> used(per_hop.begin() + static_cast<std::ptrdiff_t>(first),
                                       per_hop.begin() + static_cast<std::ptrdiff_t>(pt.config.max_hop + 1));
          for (auto& m : used) m.set_config_text(text);
          const auto k = normalize_gram(dhgak_gram(used));
          pt.report = cross_validate(k, labels, cv);
        });
        for (auto& pt : batch) {
          result.points.push_back(std::move(pt));
          if (progress) progress(result.points.back(), result.points.size(), total);
        }
      }
    }
  }
  result.best = select_best(result.points);
  return result;
}

}  // namespace dhgak
