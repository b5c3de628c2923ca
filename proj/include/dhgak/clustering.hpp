#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"

namespace dhgak {

/// Read-only view of n points of dimension dim stored row-major.
struct PointSet {
  std::span<const double> data;
  std::size_t dim = 0;

  std::size_t size() const noexcept { return dim ? data.size() / dim : 0; }
  std::span<const double> operator[](std::size_t i) const { return data.subspan(i * dim, dim); }
};

/// Cluster id per point, or kNoise for points a density method leaves out.
struct Assignment {
  static constexpr int kNoise = -1;

  std::vector<int> cluster;
  std::size_t cluster_count = 0;
  std::vector<std::string> warnings;

  std::size_t noise_count() const {
    return static_cast<std::size_t>(std::count(cluster.begin(), cluster.end(), kNoise));
  }
};

namespace clustering_detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

/// Distinct points with multiplicities. Identical inputs always share a
/// cluster in the methods below, so they are processed once.
struct UniquePoints {
  std::vector<double> data;
  std::vector<double> weight;
  std::vector<std::size_t> of_point;  // input point -> unique index
  std::size_t dim = 0;

  std::size_t size() const noexcept { return weight.size(); }
  std::span<const double> operator[](std::size_t i) const {
    return std::span<const double>(data).subspan(i * dim, dim);
  }
};

inline UniquePoints deduplicate(const PointSet& pts) {
  const std::size_t n = pts.size(), d = pts.dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto x = pts[a], y = pts[b];
    for (std::size_t j = 0; j < d; ++j)
      if (x[j] != y[j]) return x[j] < y[j];
    return a < b;
  };
  auto same = [&](std::size_t a, std::size_t b) {
    const auto x = pts[a], y = pts[b];
    for (std::size_t j = 0; j < d; ++j)
      if (x[j] != y[j]) return false;
    return true;
  };
  std::sort(order.begin(), order.end(), less);

  // Unique ids follow first appearance in input order so results do not depend
  // on the sort.
  std::vector<std::size_t> group_of(n);
  std::vector<std::size_t> first_member;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || !same(order[i - 1], order[i])) first_member.push_back(order[i]);
    group_of[order[i]] = first_member.size() - 1;
  }
  std::vector<std::size_t> group_rank(first_member.size(), SIZE_MAX);
  UniquePoints u;
  u.dim = d;
  u.of_point.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& rank = group_rank[group_of[i]];
    if (rank == SIZE_MAX) {
      rank = u.weight.size();
      u.weight.push_back(0.0);
      const auto p = pts[i];
      u.data.insert(u.data.end(), p.begin(), p.end());
    }
    u.weight[rank] += 1.0;
    u.of_point[i] = rank;
  }
  return u;
}

inline std::size_t sample_weighted(Rng& rng, std::span<const double> w, double total) {
  double u = rng.uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last_positive = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last_positive;
}

}  // namespace clustering_detail

struct KMeansOptions {
  std::size_t max_iter = 300;
  double tol = 1e-6;  // stop once no centroid moves farther than this
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are
/// re-seeded from the point farthest from its centroid. k larger than the
/// number of points is clamped (with a warning). When fewer than k distinct
/// points exist, the surplus clusters stay empty.
inline Assignment kmeans(const PointSet& pts, std::size_t k, std::uint64_t seed,
                         KMeansOptions opt = {}) {
  using namespace clustering_detail;
  if (k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
  const std::size_t n = pts.size(), d = pts.dim;
  Assignment result;
  if (n == 0) return result;
  if (k > n) {
    result.warnings.push_back("kmeans: k=" + std::to_string(k) + " exceeds point count " +
                              std::to_string(n) + "; clamped");
    k = n;
  }
  result.cluster_count = k;

  const UniquePoints u = deduplicate(pts);
  const std::size_t m = u.size();
  Rng rng(seed);

  // k-means++ on the weighted distinct points.
  std::vector<double> centers(k * d);
  auto center = [&](std::size_t c) { return std::span<double>(centers).subspan(c * d, d); };
  auto place = [&](std::size_t c, std::size_t p) {
    const auto x = u[p];
    std::copy(x.begin(), x.end(), center(c).begin());
  };
  const double total_weight = static_cast<double>(n);
  std::size_t first = sample_weighted(rng, u.weight, total_weight);
  place(0, first);
  std::vector<double> best(m), score(m);
  for (std::size_t p = 0; p < m; ++p) best[p] = squared_distance(u[p], center(0));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t p = 0; p < m; ++p) total += score[p] = u.weight[p] * best[p];
    const std::size_t pick = total > 0.0 ? sample_weighted(rng, score, total) : first;
    place(c, pick);
    for (std::size_t p = 0; p < m; ++p)
      best[p] = std::min(best[p], squared_distance(u[p], center(c)));
  }

  std::vector<int> label(m, 0);
  std::vector<double> dist(m, 0.0);
  auto assign = [&] {
    for (std::size_t p = 0; p < m; ++p) {
      const auto x = u[p];
      double bd = std::numeric_limits<double>::infinity();
      int bc = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = squared_distance(x, center(c));
        if (dd < bd) bd = dd, bc = static_cast<int>(c);
      }
      label[p] = bc;
      dist[p] = bd;
    }
  };

  std::vector<double> sums(k * d), mass(k);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    assign();
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t p = 0; p < m; ++p) {
      const auto c = static_cast<std::size_t>(label[p]);
      mass[c] += u.weight[p];
      const auto x = u[p];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += u.weight[p] * x[j];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      auto ctr = center(c);
      if (mass[c] > 0.0) {
        double shift = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double v = sums[c * d + j] / mass[c];
          shift += (v - ctr[j]) * (v - ctr[j]);
          ctr[j] = v;
        }
        moved = std::max(moved, std::sqrt(shift));
        continue;
      }
      // Empty: take over the point currently farthest from its centroid.
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      if (dist[far] <= 0.0) continue;
      place(c, far);
      moved = std::max(moved, std::sqrt(dist[far]));
      dist[far] = 0.0;
    }
    if (moved < opt.tol) break;
  }
  assign();

  result.cluster.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.cluster[i] = label[u.of_point[i]];
  return result;
}

/// Density-based clustering (DBSCAN). Neighbourhoods include the point itself
/// and count duplicates; a point is core when its eps-ball holds at least
/// min_pts points. Points reachable from no core point are noise.
inline Assignment dbscan(const PointSet& pts, double eps, std::size_t min_pts) {
  using namespace clustering_detail;
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be > 0");
  if (min_pts == 0) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  Assignment result;
  const std::size_t n = pts.size();
  if (n == 0) return result;

  const UniquePoints u = deduplicate(pts);
  const std::size_t m = u.size();
  const double eps2 = eps * eps;
  std::vector<std::vector<std::size_t>> nbrs(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (squared_distance(u[a], u[b]) <= eps2) {
        nbrs[a].push_back(b);
        nbrs[b].push_back(a);
      }
  std::vector<char> core(m, 0);
  for (std::size_t p = 0; p < m; ++p) {
    double count = u.weight[p];
    for (auto q : nbrs[p]) count += u.weight[q];
    core[p] = count >= static_cast<double>(min_pts);
  }

  std::vector<int> label(m, Assignment::kNoise);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t p = 0; p < m; ++p) {
    if (!core[p] || label[p] != Assignment::kNoise) continue;
    label[p] = next;
    stack.assign(1, p);
    while (!stack.empty()) {
      const auto q = stack.back();
      stack.pop_back();
      for (auto r : nbrs[q]) {
        if (label[r] != Assignment::kNoise) continue;
        label[r] = next;
        if (core[r]) stack.push_back(r);
      }
    }
    ++next;
  }
  result.cluster_count = static_cast<std::size_t>(next);
  result.cluster.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.cluster[i] = label[u.of_point[i]];
  return result;
}

/// Median distance to the min_pts-th nearest neighbour over a seeded sample of
/// at most `sample` points (the usual k-distance heuristic for eps).
inline double dbscan_default_eps(const PointSet& pts, std::size_t min_pts, std::uint64_t seed,
                                  std::size_t sample = 1000) {
  using clustering_detail::squared_distance;
  const std::size_t n = pts.size();
  if (n < 2) return 1.0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n > sample) {
    Rng rng(seed);
    rng.shuffle(idx.begin(), idx.end());
    idx.resize(sample);
  }
  const std::size_t kth = std::min(std::max<std::size_t>(min_pts, 1), idx.size() - 1);
  std::vector<double> kdist, row;
  kdist.reserve(idx.size());
  for (auto a : idx) {
    row.clear();
    for (auto b : idx)
      if (a != b) row.push_back(squared_distance(pts[a], pts[b]));
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kth - 1), row.end());
    kdist.push_back(std::sqrt(row[kth - 1]));
  }
  std::nth_element(kdist.begin(), kdist.begin() + static_cast<std::ptrdiff_t>(kdist.size() / 2),
                   kdist.end());
  const double eps = kdist[kdist.size() / 2];
  return eps > 0.0 ? eps : 1e-12;
}

/// The graph-membership clustering: every slice goes to the cluster of the
/// graph that owns it. `node_offsets` are the dataset's stacked row offsets.
inline Assignment oracle_clustering(std::span<const std::size_t> node_offsets) {
  Assignment a;
  if (node_offsets.empty()) return a;
  a.cluster_count = node_offsets.size() - 1;
  a.cluster.resize(node_offsets.back());
  for (std::size_t g = 0; g + 1 < node_offsets.size(); ++g)
    for (std::size_t r = node_offsets[g]; r < node_offsets[g + 1]; ++r)
      a.cluster[r] = static_cast<int>(g);
  return a;
}

}  // namespace dhgak
