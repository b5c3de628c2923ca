#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dhgak {

struct SvmOptions {
  double tol = 1e-3;                // KKT violation tolerance (max gap m - M)
  std::size_t max_iter = 10'000'000;
  bool record_objective = false;    // keep the dual objective after every step
};

/// Binary C-SVM over a precomputed kernel. Training points are addressed by
/// their position in the training set.
struct SvmModel {
  std::vector<std::size_t> support;   // training positions with alpha > 0
  std::vector<double> dual_coef;      // alpha_i * y_i for each support vector
  std::vector<double> alpha;          // all multipliers, training order
  double bias = 0.0;                  // f(x) = sum dual_coef K(sv, x) + bias
  double C = 1.0;
  std::pair<int, int> class_pair{+1, -1};
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> objective_trace;  // dual objective, if recorded

  /// `k_row(i)` must return K(training point i, x).
  template <class KernelRow>
  double decision(KernelRow&& k_row) const {
    double f = bias;
    for (std::size_t s = 0; s < support.size(); ++s) f += dual_coef[s] * k_row(support[s]);
    return f;
  }
};

/// Sequential minimal optimisation with second-order working-set selection
/// (the LIBSVM solver without shrinking). `gram` is the n x n row-major kernel
/// over the training points, `y` holds +1/-1.
inline SvmModel svm_train(std::span<const double> gram, std::span<const int> y, double C,
                          SvmOptions opt = {}) {
  const std::size_t n = y.size();
  if (gram.size() != n * n) throw std::invalid_argument("svm_train: kernel is not n x n");
  if (!(C > 0.0)) throw std::invalid_argument("svm_train: C must be > 0");
  for (int v : y)
    if (v != 1 && v != -1) throw std::invalid_argument("svm_train: labels must be +1 or -1");

  constexpr double kTau = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();
  auto K = [&](std::size_t i, std::size_t j) { return gram[i * n + j]; };

  SvmModel m;
  m.C = C;
  std::vector<double>& a = m.alpha;
  a.assign(n, 0.0);
  std::vector<double> G(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  auto objective = [&] {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += a[t] * (G[t] - 1.0);
    return -0.5 * f;
  };
  auto in_up = [&](std::size_t t) { return y[t] == 1 ? a[t] < C : a[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] == 1 ? a[t] > 0.0 : a[t] < C; };

  if (opt.record_objective) m.objective_trace.push_back(objective());
  while (m.iterations < opt.max_iter) {
    double gmax = -inf;
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (in_up(t) && -y[t] * G[t] >= gmax) gmax = -y[t] * G[t], i = t;
    double gmax2 = -inf, best = inf;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double yg = y[t] * G[t];
      gmax2 = std::max(gmax2, yg);
      if (i == n) continue;
      const double diff = gmax + yg;
      if (diff > 0.0) {
        double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best) best = obj, j = t;
      }
    }
    if (i == n || j == n || gmax + gmax2 < opt.tol) {
      m.converged = true;
      break;
    }
    ++m.iterations;

    const double ai = a[i], aj = a[j];
    const double Qij = y[i] * y[j] * K(i, j);
    if (y[i] != y[j]) {
      double quad = K(i, i) + K(j, j) + 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) a[j] = 0.0, a[i] = diff;
      } else if (a[i] < 0.0) {
        a[i] = 0.0, a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > C) a[i] = C, a[j] = C - diff;
      } else if (a[j] > C) {
        a[j] = C, a[i] = C + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2.0 * Qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) a[i] = C, a[j] = sum - C;
      } else if (a[j] < 0.0) {
        a[j] = 0.0, a[i] = sum;
      }
      if (sum > C) {
        if (a[j] > C) a[j] = C, a[i] = sum - C;
      } else if (a[i] < 0.0) {
        a[i] = 0.0, a[j] = sum;
      }
    }
    const double di = a[i] - ai, dj = a[j] - aj;
    for (std::size_t t = 0; t < n; ++t)
      G[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj);
    if (opt.record_objective) m.objective_trace.push_back(objective());
  }

  // Offset as in LIBSVM: mean of y*G over free vectors, else bound midpoint.
  double ub = inf, lb = -inf, sum_free = 0.0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (a[t] >= C) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (a[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  double rho;
  if (free > 0) rho = sum_free / static_cast<double>(free);
  else if (std::isfinite(ub) && std::isfinite(lb)) rho = 0.5 * (ub + lb);
  else rho = std::isfinite(ub) ? ub : lb;
  m.bias = -rho;

  for (std::size_t t = 0; t < n; ++t)
    if (a[t] > 0.0) {
      m.support.push_back(t);
      m.dual_coef.push_back(a[t] * y[t]);
    }
  return m;
}

/// One-vs-one reduction over class ids; prediction by majority vote with ties
/// going to the smaller class id.
class MulticlassSvm {
 public:
  /// `gram`: n x n kernel over the training points; `labels`: class ids.
  MulticlassSvm(std::span<const double> gram, std::span<const int> labels, double C,
                SvmOptions opt = {}) {
    const std::size_t n = labels.size();
    classes_.assign(labels.begin(), labels.end());
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    for (std::size_t a = 0; a < classes_.size(); ++a)
      for (std::size_t b = a + 1; b < classes_.size(); ++b) {
        std::vector<std::size_t> idx;
        std::vector<int> y;
        for (std::size_t t = 0; t < n; ++t)
          if (labels[t] == classes_[a] || labels[t] == classes_[b]) {
            idx.push_back(t);
            y.push_back(labels[t] == classes_[a] ? 1 : -1);
          }
        std::vector<double> sub(idx.size() * idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
          for (std::size_t c = 0; c < idx.size(); ++c) sub[r * idx.size() + c] = gram[idx[r] * n + idx[c]];
        auto model = svm_train(sub, y, C, opt);
        model.class_pair = {classes_[a], classes_[b]};
        converged_ = converged_ && model.converged;
        models_.push_back(std::move(model));
        members_.push_back(std::move(idx));
      }
  }

  /// `k_row(t)` must return K(training point t, x).
  template <class KernelRow>
  int predict(KernelRow&& k_row) const {
    if (classes_.size() == 1) return classes_.front();
    std::map<int, std::size_t> votes;
    for (std::size_t p = 0; p < models_.size(); ++p) {
      const auto& idx = members_[p];
      const double f = models_[p].decision([&](std::size_t s) { return k_row(idx[s]); });
      ++votes[f > 0.0 ? models_[p].class_pair.first : models_[p].class_pair.second];
    }
    int best = classes_.front();
    std::size_t best_votes = 0;
    for (int c : classes_)
      if (votes[c] > best_votes) best = c, best_votes = votes[c];
    return best;
  }

  const std::vector<int>& classes() const noexcept { return classes_; }
  const std::vector<SvmModel>& models() const noexcept { return models_; }
  bool converged() const noexcept { return converged_; }

 private:
  std::vector<int> classes_;
  std::vector<SvmModel> models_;
  std::vector<std::vector<std::size_t>> members_;
  bool converged_ = true;
};

}  // namespace dhgak
