#ifndef CITYMORPH_CLUSTERING_HPP
#define CITYMORPH_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "citymorph/error.hpp"
#include "citymorph/parallel.hpp"
#include "citymorph/random.hpp"

namespace citymorph {

inline constexpr int kMaxLloydIterations = 300;

struct ClusteringResult {
  int k = 0;
  std::vector<int> labels;     // one per row, 0..k-1
  Eigen::MatrixXd centroids;   // k x dims
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // after each update step of the winning restart
  int iterations = 0;
  std::uint64_t seed = 0;
  int restarts = 0;
};

namespace detail {

inline double sq_dist(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& c, Eigen::Index j) {
  return (x.row(i) - c.row(j)).squaredNorm();
}

inline Eigen::MatrixXd kmeans_pp(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  c.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = sq_dist(x, i, c, 0);
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double run = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        run += d2[static_cast<std::size_t>(i)];
        if (run > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    }
    c.row(j) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], sq_dist(x, i, c, j));
  }
  return c;
}

inline int nearest(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& c) {
  int best = 0;
  double best_d = sq_dist(x, i, c, 0);
  for (Eigen::Index j = 1; j < c.rows(); ++j) {
    const double d = sq_dist(x, i, c, j);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

// Recomputes centroids as cluster means. An empty cluster takes the point
// farthest from its own centroid among clusters with two or more members.
inline void update_centroids(const Eigen::MatrixXd& x, std::vector<int>& labels, Eigen::MatrixXd& c) {
  const int k = static_cast<int>(c.rows());
  auto recompute = [&] {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    c.setZero();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      c.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int j = 0; j < k; ++j)
      if (sizes[static_cast<std::size_t>(j)]) c.row(j) /= sizes[static_cast<std::size_t>(j)];
    return sizes;
  };
  auto sizes = recompute();
  for (int j = 0; j < k; ++j) {
    if (sizes[static_cast<std::size_t>(j)] > 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(l)] < 2) continue;
      const double d = sq_dist(x, i, c, l);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) throw Error(ErrorKind::internal, "cannot repair empty cluster");
    labels[static_cast<std::size_t>(far)] = j;
    sizes = recompute();
  }
}

inline double inertia_of(const Eigen::MatrixXd& x, const std::vector<int>& labels, const Eigen::MatrixXd& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += sq_dist(x, i, c, labels[static_cast<std::size_t>(i)]);
  return s;
}

}  // namespace detail

/// Lloyd iterations from the given initial centroids. A point changes
/// cluster only for a strictly closer centroid, so inertia never increases.
inline ClusteringResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centroids) {
  ClusteringResult r;
  r.k = static_cast<int>(centroids.rows());
  r.labels.resize(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) r.labels[static_cast<std::size_t>(i)] = detail::nearest(x, i, centroids);
  for (int it = 0; it < kMaxLloydIterations; ++it) {
    detail::update_centroids(x, r.labels, centroids);
    r.inertia_trace.push_back(detail::inertia_of(x, r.labels, centroids));
    r.iterations = it + 1;
    bool changed = false;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      int& l = r.labels[static_cast<std::size_t>(i)];
      double best_d = detail::sq_dist(x, i, centroids, l);
      for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
        const double d = detail::sq_dist(x, i, centroids, j);
        if (d < best_d) {
          best_d = d;
          l = static_cast<int>(j);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  detail::update_centroids(x, r.labels, centroids);
  r.centroids = std::move(centroids);
  r.inertia = detail::inertia_of(x, r.labels, r.centroids);
  return r;
}

/// k-means++ seeding, Lloyd refinement, best of `restarts` by inertia.
/// Deterministic for fixed (data, k, seed, restarts).
inline ClusteringResult kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed, int restarts = 10) {
  if (x.rows() == 0 || x.cols() == 0) throw DataError("k-means needs a non-empty matrix");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > x.rows())
    throw ValidationError("k = " + std::to_string(k) + " exceeds the number of cities (" + std::to_string(x.rows()) + ")");
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  std::vector<ClusteringResult> runs(static_cast<std::size_t>(restarts));
  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    runs[r] = lloyd(x, detail::kmeans_pp(x, k, rng));
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  ClusteringResult out = std::move(runs[best]);
  out.seed = seed;
  out.restarts = restarts;
  return out;
}

namespace detail {

inline int cluster_count(const std::vector<int>& labels, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) throw ValidationError("label count does not match rows");
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw ValidationError("negative cluster label");
    k = std::max(k, l + 1);
  }
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (int s : sizes)
    if (s == 0) throw ValidationError("cluster labels are not contiguous: an id in 0..k-1 is unused");
  return k;
}

}  // namespace detail

/// Mean silhouette with Euclidean distances; singleton clusters score 0.
inline double silhouette(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const int k = detail::cluster_count(labels, x.rows());
  if (k < 2) throw ValidationError("silhouette is undefined for a single cluster");
  const Eigen::Index n = x.rows();
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = labels[static_cast<std::size_t>(i)];
    if (sizes[static_cast<std::size_t>(own)] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += (x.row(i) - x.row(j)).norm();
    const double a = sums[static_cast<std::size_t>(own)] / (sizes[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[static_cast<std::size_t>(c)] / sizes[static_cast<std::size_t>(c)]);
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

/// Ratio used in place of (S_i + S_j) / 0 when two centroids coincide.
inline constexpr double kCoincidentCentroidRatio = 1e12;

struct DaviesBouldin {
  double value = 0.0;
  bool coincident_centroids = false;
};

/// Mean over clusters of the worst (S_i + S_j) / M_ij, S = mean distance to
/// own centroid, M = centroid distance. Lower is better.
inline DaviesBouldin davies_bouldin(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const int k = detail::cluster_count(labels, x.rows());
  if (k < 2) throw ValidationError("Davies-Bouldin index is undefined for a single cluster");
  const auto uk = static_cast<std::size_t>(k);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, x.cols());
  std::vector<int> sizes(uk, 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    c.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (int j = 0; j < k; ++j) c.row(j) /= sizes[static_cast<std::size_t>(j)];
  std::vector<double> scatter(uk, 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    scatter[static_cast<std::size_t>(l)] += (x.row(i) - c.row(l)).norm();
  }
  for (std::size_t j = 0; j < uk; ++j) scatter[j] /= sizes[j];

  DaviesBouldin out;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double m = (c.row(i) - c.row(j)).norm();
      double ratio;
      if (m > 0.0) {
        ratio = (scatter[static_cast<std::size_t>(i)] + scatter[static_cast<std::size_t>(j)]) / m;
      } else {
        ratio = kCoincidentCentroidRatio;
        out.coincident_centroids = true;
      }
      worst = std::max(worst, ratio);
    }
    total += worst;
  }
  out.value = total / k;
  return out;
}

struct ElbowEntry {
  int k = 0;
  double inertia = 0.0;
};

using ElbowCurve = std::vector<ElbowEntry>;

/// Best inertia per k. Each k > 1 also gets a warm start from the previous
/// k's centroids plus the worst-fit point, so the curve never rises.
inline ElbowCurve elbow(const Eigen::MatrixXd& x, int k_min, int k_max, std::uint64_t seed, int restarts = 10) {
  if (k_min < 1 || k_max < k_min || k_max > x.rows())
    throw ValidationError("k range " + std::to_string(k_min) + ".." + std::to_string(k_max) + " is outside 1.." +
                          std::to_string(x.rows()));
  ElbowCurve curve;
  std::optional<ClusteringResult> prev;
  for (int k = k_min; k <= k_max; ++k) {
    ClusteringResult best = kmeans(x, k, seed, restarts);
    if (prev) {
      Eigen::MatrixXd init(k, x.cols());
      init.topRows(k - 1) = prev->centroids;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double d = detail::sq_dist(x, i, prev->centroids, prev->labels[static_cast<std::size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      init.row(k - 1) = x.row(far);
      ClusteringResult warm = lloyd(x, init);
      if (warm.inertia < best.inertia) best = std::move(warm);
    }
    curve.push_back({k, best.inertia});
    prev = std::move(best);
  }
  return curve;
}

/// Adjusted Rand index between two labelings of the same points.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw ValidationError("labelings differ in length");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto c2 = [](double v) { return v * (v - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, v] : table) index += c2(v);
  for (const auto& [key, v] : rows) sum_a += c2(v);
  for (const auto& [key, v] : cols) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(n);
  const double max_index = (sum_a + sum_b) / 2.0;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

/// Fraction of points whose cluster's majority truth label matches theirs.
inline double purity(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw ValidationError("labelings differ in length");
  if (predicted.empty()) return 0.0;
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < predicted.size(); ++i) ++counts[predicted[i]][truth[i]];
  int hits = 0;
  for (const auto& [cluster, by_truth] : counts) {
    int best = 0;
    for (const auto& [t, c] : by_truth) best = std::max(best, c);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace citymorph

#endif  // CITYMORPH_CLUSTERING_HPP
