#ifndef CITYMORPH_FEATURES_HPP
#define CITYMORPH_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "citymorph/bearings.hpp"
#include "citymorph/error.hpp"
#include "citymorph/geometry.hpp"
#include "citymorph/topology.hpp"

namespace citymorph {

enum class FeatureMode { baseline, enhanced };

inline std::string_view to_string(FeatureMode m) { return m == FeatureMode::baseline ? "baseline" : "enhanced"; }

inline FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "baseline") return FeatureMode::baseline;
  if (s == "enhanced") return FeatureMode::enhanced;
  throw ValidationError("unknown feature mode '" + std::string(s) + "' (expected baseline or enhanced)");
}

/// Everything computed for one city. Baseline features need `topo`; the
/// enhanced set also needs `patterns` and `bearings`.
struct CityMetrics {
  std::string city;
  std::optional<TopoMetrics> topo;
  std::optional<PatternCounts> patterns;
  std::optional<BearingHistogram> bearings;
};

inline std::vector<std::string> baseline_feature_names() {
  return {"prop_deg1", "prop_deg2", "prop_deg3", "prop_deg4", "prop_deg5plus",
          "median_bc", "mean_link_length_m", "density_km_per_km2", "link_node_ratio"};
}

inline std::vector<std::string> feature_names(FeatureMode mode) {
  auto names = baseline_feature_names();
  if (mode == FeatureMode::baseline) return names;
  for (int d : {3, 4})
    for (int t = 1; t <= kPatternTypes; ++t) names.push_back("d" + std::to_string(d) + "_t" + std::to_string(t));
  for (std::size_t k = 1; k <= kBearingBins; ++k)
    names.push_back(std::string("bearing_bin") + (k < 10 ? "0" : "") + std::to_string(k));
  names.push_back("dominant_bin_count");
  return names;
}

enum class Normalization { none, zscore };

struct FeatureMatrix {
  std::vector<std::string> cities;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;  // cities x features
  Normalization normalization = Normalization::none;
  std::vector<double> means;            // set by zscore
  std::vector<double> stddevs;          // population convention
  std::vector<bool> constant_columns;   // set by zscore

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  std::optional<Eigen::Index> column(std::string_view name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j)
      if (feature_names[j] == name) return static_cast<Eigen::Index>(j);
    return std::nullopt;
  }
};

/// Builds the cities x features table in the fixed column order.
inline FeatureMatrix assemble_features(const std::vector<CityMetrics>& cities, FeatureMode mode) {
  if (cities.empty()) throw DataError("empty corpus");
  FeatureMatrix m;
  m.feature_names = feature_names(mode);
  m.values.resize(static_cast<Eigen::Index>(cities.size()), static_cast<Eigen::Index>(m.feature_names.size()));
  for (std::size_t r = 0; r < cities.size(); ++r) {
    const auto& c = cities[r];
    auto missing = [&](const char* what) {
      return DataError("city '" + c.city + "' is missing " + what + " required by the " +
                       std::string(to_string(mode)) + " feature set");
    };
    if (!c.topo) throw missing("topology metrics");
    m.cities.push_back(c.city);
    std::vector<double> row;
    row.reserve(m.feature_names.size());
    for (std::size_t d = 1; d <= 5; ++d) row.push_back(c.topo->degree_profile.proportions_out[d]);
    row.push_back(c.topo->centrality.median_normalized_bc);
    row.push_back(c.topo->mean_link_length);
    row.push_back(c.topo->network_density);
    row.push_back(c.topo->link_node_ratio);
    if (mode == FeatureMode::enhanced) {
      if (!c.patterns) throw missing("intersection pattern counts");
      if (!c.bearings) throw missing("bearing histogram");
      for (int t = 1; t <= kPatternTypes; ++t) row.push_back(c.patterns->d3[static_cast<std::size_t>(t)]);
      for (int t = 1; t <= kPatternTypes; ++t) row.push_back(c.patterns->d4[static_cast<std::size_t>(t)]);
      for (double v : c.bearings->bins) row.push_back(v);
      row.push_back(static_cast<double>(c.bearings->dominant_bin_count));
    }
    for (std::size_t j = 0; j < row.size(); ++j)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = row[j];
  }
  return m;
}

/// Removes the named columns. Unknown names are a validation error.
inline FeatureMatrix drop_features(const FeatureMatrix& in, const std::vector<std::string>& names) {
  std::vector<bool> drop(in.feature_names.size(), false);
  for (const auto& name : names) {
    const auto j = in.column(name);
    if (!j) throw ValidationError("unknown feature '" + name + "'");
    drop[static_cast<std::size_t>(*j)] = true;
  }
  FeatureMatrix out;
  out.cities = in.cities;
  out.normalization = in.normalization;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < drop.size(); ++j) {
    if (drop[j]) continue;
    keep.push_back(static_cast<Eigen::Index>(j));
    out.feature_names.push_back(in.feature_names[j]);
    if (!in.means.empty()) out.means.push_back(in.means[j]);
    if (!in.stddevs.empty()) out.stddevs.push_back(in.stddevs[j]);
    if (!in.constant_columns.empty()) out.constant_columns.push_back(in.constant_columns[j]);
  }
  out.values.resize(in.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.values.col(static_cast<Eigen::Index>(j)) = in.values.col(keep[j]);
  return out;
}

namespace detail {

inline bool is_constant(double mean, double sd) { return sd <= 1e-12 * std::max(1.0, std::abs(mean)); }

}  // namespace detail

/// Per-column standardization with the population standard deviation.
/// Constant columns become zero and are flagged.
inline FeatureMatrix zscore(const FeatureMatrix& in) {
  if (in.rows() < 2) throw DataError("z-score needs at least 2 cities, got " + std::to_string(in.rows()));
  FeatureMatrix out = in;
  const double n = static_cast<double>(in.rows());
  out.means.assign(static_cast<std::size_t>(in.cols()), 0.0);
  out.stddevs.assign(static_cast<std::size_t>(in.cols()), 0.0);
  out.constant_columns.assign(static_cast<std::size_t>(in.cols()), false);
  for (Eigen::Index j = 0; j < in.cols(); ++j) {
    const auto col = in.values.col(j);
    const double mean = col.sum() / n;
    const double sd = std::sqrt((col.array() - mean).square().sum() / n);
    const auto sj = static_cast<std::size_t>(j);
    out.means[sj] = mean;
    out.stddevs[sj] = sd;
    if (detail::is_constant(mean, sd)) {
      out.constant_columns[sj] = true;
      out.values.col(j).setZero();
    } else {
      out.values.col(j) = (col.array() - mean) / sd;
    }
  }
  out.normalization = Normalization::zscore;
  return out;
}

struct CorrelatedPair {
  std::string a;
  std::string b;
  double r = 0.0;
};

struct CorrelationReport {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd matrix;
  std::vector<bool> degenerate;  // constant column: off-diagonal entries reported as 0
  std::vector<CorrelatedPair> flagged_pairs;
};

/// Pearson correlation between all feature columns, plus pairs with
/// |r| >= threshold.
inline CorrelationReport pearson_report(const FeatureMatrix& m, double threshold) {
  if (m.rows() < 3) throw DataError("correlation needs at least 3 cities, got " + std::to_string(m.rows()));
  const Eigen::Index p = m.cols();
  const double n = static_cast<double>(m.rows());
  CorrelationReport rep;
  rep.feature_names = m.feature_names;
  rep.degenerate.assign(static_cast<std::size_t>(p), false);
  Eigen::MatrixXd centered = m.values;
  std::vector<double> norms(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = centered.col(j).sum() / n;
    centered.col(j).array() -= mean;
    const double sd = std::sqrt(centered.col(j).squaredNorm() / n);
    norms[static_cast<std::size_t>(j)] = centered.col(j).norm();
    if (detail::is_constant(mean, sd)) rep.degenerate[static_cast<std::size_t>(j)] = true;
  }
  rep.matrix = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      double r = 0.0;
      if (!rep.degenerate[static_cast<std::size_t>(i)] && !rep.degenerate[static_cast<std::size_t>(j)]) {
        r = centered.col(i).dot(centered.col(j)) / (norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)]);
        r = std::clamp(r, -1.0, 1.0);
      }
      rep.matrix(i, j) = rep.matrix(j, i) = r;
      if (std::abs(r) >= threshold)
        rep.flagged_pairs.push_back({m.feature_names[static_cast<std::size_t>(i)],
                                     m.feature_names[static_cast<std::size_t>(j)], r});
    }
  }
  return rep;
}

}  // namespace citymorph

#endif  // CITYMORPH_FEATURES_HPP
