// Independent reference implementations used only by the tests. They favour
// the plainest formulation of each quantity over speed.
#ifndef CITYMORPH_TESTS_ORACLES_HPP
#define CITYMORPH_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "citymorph/citymorph.hpp"

namespace oracle {

using citymorph::GeoPoint;

// --- distances -------------------------------------------------------------

/// Vincenty inverse on the WGS84 ellipsoid, meters.
inline double vincenty_m(GeoPoint p1, GeoPoint p2) {
  constexpr double a = 6378137.0;
  constexpr double f = 1.0 / 298.257223563;
  const double b = a * (1.0 - f);
  const double rad = std::numbers::pi / 180.0;
  const double L = (p2.x - p1.x) * rad;
  const double U1 = std::atan((1.0 - f) * std::tan(p1.y * rad));
  const double U2 = std::atan((1.0 - f) * std::tan(p2.y * rad));
  const double sinU1 = std::sin(U1), cosU1 = std::cos(U1), sinU2 = std::sin(U2), cosU2 = std::cos(U2);
  double lambda = L, prev = 0.0;
  double sinSigma = 0, cosSigma = 0, sigma = 0, cos2Alpha = 0, cos2SigmaM = 0;
  for (int it = 0; it < 200; ++it) {
    const double sinL = std::sin(lambda), cosL = std::cos(lambda);
    sinSigma = std::sqrt(std::pow(cosU2 * sinL, 2) + std::pow(cosU1 * sinU2 - sinU1 * cosU2 * cosL, 2));
    if (sinSigma == 0.0) return 0.0;
    cosSigma = sinU1 * sinU2 + cosU1 * cosU2 * cosL;
    sigma = std::atan2(sinSigma, cosSigma);
    const double sinAlpha = cosU1 * cosU2 * sinL / sinSigma;
    cos2Alpha = 1.0 - sinAlpha * sinAlpha;
    cos2SigmaM = cos2Alpha != 0.0 ? cosSigma - 2.0 * sinU1 * sinU2 / cos2Alpha : 0.0;
    const double C = f / 16.0 * cos2Alpha * (4.0 + f * (4.0 - 3.0 * cos2Alpha));
    prev = lambda;
    lambda = L + (1.0 - C) * f * sinAlpha *
                     (sigma + C * sinSigma * (cos2SigmaM + C * cosSigma * (-1.0 + 2.0 * cos2SigmaM * cos2SigmaM)));
    if (std::abs(lambda - prev) < 1e-14) break;
  }
  const double u2 = cos2Alpha * (a * a - b * b) / (b * b);
  const double A = 1.0 + u2 / 16384.0 * (4096.0 + u2 * (-768.0 + u2 * (320.0 - 175.0 * u2)));
  const double B = u2 / 1024.0 * (256.0 + u2 * (-128.0 + u2 * (74.0 - 47.0 * u2)));
  const double dSigma =
      B * sinSigma *
      (cos2SigmaM + B / 4.0 *
                        (cosSigma * (-1.0 + 2.0 * cos2SigmaM * cos2SigmaM) -
                         B / 6.0 * cos2SigmaM * (-3.0 + 4.0 * sinSigma * sinSigma) * (-3.0 + 4.0 * cos2SigmaM * cos2SigmaM)));
  return b * A * (sigma - dSigma);
}

/// Great-circle distance from the chord between unit vectors.
inline double chord_sphere_m(GeoPoint p, GeoPoint q, double radius = 6378137.0) {
  const double rad = std::numbers::pi / 180.0;
  auto unit = [&](GeoPoint g) {
    return Eigen::Vector3d(std::cos(g.y * rad) * std::cos(g.x * rad), std::cos(g.y * rad) * std::sin(g.x * rad),
                           std::sin(g.y * rad));
  };
  const double chord = (unit(p) - unit(q)).norm();
  return 2.0 * radius * std::asin(chord / 2.0);
}

// --- betweenness -----------------------------------------------------------

struct Arc {
  std::size_t from, to;
  double w;
};

/// Raw betweenness by pair enumeration: all-pairs distances (Floyd-Warshall),
/// shortest-path counts per ordered pair, then for every pair (s, t) and
/// every third node v the share sigma_sv * sigma_vt / sigma_st. Parallel
/// arcs of equal length count as distinct paths.
inline std::vector<double> betweenness(std::size_t n, const std::vector<Arc>& arcs, double tie = 1e-12) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& a : arcs) d[a.from][a.to] = std::min(d[a.from][a.to], a.w);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];

  auto same = [&](double x, double y) { return std::abs(x - y) <= tie * std::max(x, y); };

  // sigma[s][v]: number of shortest s->v paths
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> order;
    for (std::size_t v = 0; v < n; ++v)
      if (d[s][v] < inf) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[s][x] < d[s][y]; });
    sigma[s][s] = 1.0;
    for (std::size_t v : order) {
      if (v == s) continue;
      for (const auto& a : arcs)
        if (a.to == v && d[s][a.from] < inf && same(d[s][a.from] + a.w, d[s][v])) sigma[s][v] += sigma[s][a.from];
    }
  }

  std::vector<double> bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || d[s][t] == inf) continue;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == s || v == t || d[s][v] == inf || d[v][t] == inf) continue;
        if (same(d[s][v] + d[v][t], d[s][t])) bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
      }
    }
  return bc;
}

// --- eigenvalues -----------------------------------------------------------

/// Characteristic polynomial coefficients c[0..n] (c[n] = 1, monic) of a
/// square matrix by the Faddeev-LeVerrier recursion.
inline std::vector<long double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const M A = a.cast<long double>();
  std::vector<long double> c(n + 1, 0.0L);
  c[n] = 1.0L;
  M m = M::Zero(a.rows(), a.cols());
  const M id = M::Identity(a.rows(), a.cols());
  for (std::size_t k = 1; k <= n; ++k) {
    m = A * m + c[n - k + 1] * id;
    c[n - k] = -(A * m).trace() / static_cast<long double>(k);
  }
  return c;
}

inline long double eval_poly(const std::vector<long double>& c, long double x) {
  long double v = 0.0L;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

/// Real roots of the characteristic polynomial inside [lo, hi], found by a
/// sign-change scan and bisection. Descending.
inline std::vector<double> eigenvalues_by_bisection(const Eigen::MatrixXd& a, double lo, double hi,
                                                    int grid = 200000) {
  const auto c = characteristic_polynomial(a);
  std::vector<double> roots;
  const long double step = (static_cast<long double>(hi) - lo) / grid;
  long double x0 = lo, f0 = eval_poly(c, x0);
  for (int i = 1; i <= grid; ++i) {
    const long double x1 = lo + step * i;
    const long double f1 = eval_poly(c, x1);
    if (f0 == 0.0L) {
      roots.push_back(static_cast<double>(x0));
    } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0L) {
      long double l = x0, r = x1, fl = f0;
      for (int it = 0; it < 200; ++it) {
        const long double mid = (l + r) / 2;
        const long double fm = eval_poly(c, mid);
        if ((fm < 0) == (fl < 0)) {
          l = mid;
          fl = fm;
        } else {
          r = mid;
        }
      }
      roots.push_back(static_cast<double>((l + r) / 2));
    }
    x0 = x1;
    f0 = f1;
  }
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

// --- cluster indices -------------------------------------------------------

inline double dist(const Eigen::MatrixXd& x, Eigen::Index i, Eigen::Index j) { return (x.row(i) - x.row(j)).norm(); }

/// Mean over points of (b - a) / max(a, b); singleton clusters score 0.
inline double silhouette(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::vector<int> cnt(static_cast<std::size_t>(k), 0);
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      if (j == i) continue;
      sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += dist(x, i, j);
      ++cnt[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
    }
    const auto own = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    if (cnt[own] == 0) continue;
    const double a = sum[own] / cnt[own];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sum.size(); ++c)
      if (c != own && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    const double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(x.rows());
}

/// (1/k) sum_i max_{j != i} (S_i + S_j) / M_ij.
inline double davies_bouldin(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Eigen::VectorXd> centroid(static_cast<std::size_t>(k), Eigen::VectorXd::Zero(x.cols()));
  std::vector<int> cnt(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    centroid[c] += x.row(i).transpose();
    ++cnt[c];
  }
  for (std::size_t c = 0; c < centroid.size(); ++c) centroid[c] /= cnt[c];
  std::vector<double> s(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    s[c] += (x.row(i).transpose() - centroid[c]).norm() / cnt[c];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != i) worst = std::max(worst, (s[i] + s[j]) / (centroid[i] - centroid[j]).norm());
    total += worst;
  }
  return total / k;
}

}  // namespace oracle

#endif  // CITYMORPH_TESTS_ORACLES_HPP
