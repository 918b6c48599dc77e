#ifndef CITYMORPH_REDUCTION_HPP
#define CITYMORPH_REDUCTION_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "citymorph/error.hpp"
#include "citymorph/features.hpp"

namespace citymorph {

/// Eigenvalues above 1 + this count toward the Kaiser rule.
inline constexpr double kKaiserTolerance = 1e-9;

/// Principal-component factor extraction from the feature correlation
/// matrix, unrotated.
struct FactorModel {
  std::vector<std::string> feature_names;      // features that entered the model
  std::vector<std::string> excluded_features;  // constant columns
  Eigen::MatrixXd correlation;                 // features x features
  std::vector<double> eigenvalues;             // descending
  Eigen::MatrixXd eigenvectors;                // columns match eigenvalues
  int retained = 1;
  Eigen::MatrixXd loadings;  // features x retained, eigenvector * sqrt(eigenvalue)
  Eigen::MatrixXd scores;    // cities x retained
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

/// Number of eigenvalues strictly above 1 (within tolerance), at least 1.
inline int kaiser_count(const std::vector<double>& eigenvalues) {
  const auto n = std::count_if(eigenvalues.begin(), eigenvalues.end(),
                               [](double v) { return v > 1.0 + kKaiserTolerance; });
  return std::max(1, static_cast<int>(n));
}

inline FactorModel extract_factors(const FeatureMatrix& m, std::optional<int> retained_override = std::nullopt) {
  if (m.normalization != Normalization::zscore) throw ValidationError("factor extraction expects a z-scored matrix");
  if (m.rows() < 3) throw DataError("factor extraction needs at least 3 cities, got " + std::to_string(m.rows()));
  if (!m.values.allFinite()) throw DataError("feature matrix contains non-finite values");

  FactorModel fm;
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const auto sj = static_cast<std::size_t>(j);
    if (!m.constant_columns.empty() && m.constant_columns[sj]) {
      fm.excluded_features.push_back(m.feature_names[sj]);
    } else {
      active.push_back(j);
      fm.feature_names.push_back(m.feature_names[sj]);
    }
  }
  if (active.empty()) throw DataError("every feature column is constant; nothing to extract");

  const auto p = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd z(m.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) z.col(j) = m.values.col(active[static_cast<std::size_t>(j)]);
  fm.correlation = (z.transpose() * z) / static_cast<double>(m.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(fm.correlation);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::internal, "eigendecomposition failed");
  // Eigen sorts ascending.
  fm.eigenvectors.resize(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    fm.eigenvalues.push_back(solver.eigenvalues()(p - 1 - k));
    Eigen::VectorXd v = solver.eigenvectors().col(p - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    fm.eigenvectors.col(k) = v;
  }

  const int kaiser = kaiser_count(fm.eigenvalues);
  if (retained_override) {
    if (*retained_override < 1 || *retained_override > p)
      throw ValidationError("--factors must be in 1.." + std::to_string(p) + ", got " +
                            std::to_string(*retained_override));
    fm.retained = *retained_override;
  } else {
    fm.retained = kaiser;
    if (fm.eigenvalues.front() <= 1.0 + kKaiserTolerance)
      fm.warnings.push_back("no eigenvalue exceeds 1; retaining a single factor");
  }
  for (double v : fm.eigenvalues)
    if (std::abs(v - 1.0) <= 1e-6) {
      fm.warnings.push_back("eigenvalue within 1e-6 of 1; Kaiser cut is sensitive here");
      break;
    }
  fm.rank_deficient = p > m.rows() || fm.eigenvalues.back() < 1e-9;
  if (fm.rank_deficient) fm.warnings.push_back("correlation matrix is rank deficient");

  const Eigen::MatrixXd basis = fm.eigenvectors.leftCols(fm.retained);
  fm.loadings = basis;
  for (int k = 0; k < fm.retained; ++k)
    fm.loadings.col(k) *= std::sqrt(std::max(0.0, fm.eigenvalues[static_cast<std::size_t>(k)]));
  fm.scores = z * basis;
  return fm;
}

}  // namespace citymorph

#endif  // CITYMORPH_REDUCTION_HPP
