#pragma once

// Prediction error metrics and the species-mixture drag combiner.

#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "lagp/error.hpp"
#include "lagp/gp.hpp"

namespace lagp {

inline constexpr std::size_t kSpecies = 6;

/// Species order used everywhere: O, O2, N, N2, He, H.
inline constexpr std::array<const char*, kSpecies> kSpeciesNames = {"O", "O2", "N", "N2", "He", "H"};

/// Particle masses in atomic mass units (standard atomic weights).
inline constexpr std::array<double, kSpecies> kParticleMass = {15.999, 31.998, 14.007,
                                                               28.014, 4.0026, 1.008};

struct SpeciesMixture {
  std::array<double, kSpecies> mole_fraction{};
  std::array<double, kSpecies> mass = kParticleMass;

  void validate() const {
    double total = 0.0;
    for (std::size_t k = 0; k < kSpecies; ++k) {
      detail::require(mole_fraction[k] >= 0.0 && std::isfinite(mole_fraction[k]),
                      ErrorKind::data, "mole fractions must be nonnegative");
      detail::require(mass[k] > 0.0, ErrorKind::data, "particle masses must be positive");
      total += mole_fraction[k] * mass[k];
    }
    detail::require(total > 0.0, ErrorKind::data, "mixture has zero total weight");
  }
};

/// sum C_k chi_k m_k / sum chi_k m_k.
inline double mixture_drag(const std::array<double, kSpecies>& per_species,
                           const SpeciesMixture& mix) {
  mix.validate();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < kSpecies; ++k) {
    const double w = mix.mole_fraction[k] * mix.mass[k];
    num += per_species[k] * w;
    den += w;
  }
  return num / den;
}

namespace detail {

inline void check_same_length(Eigen::Index a, Eigen::Index b, const char* what) {
  require(a == b, ErrorKind::data,
          std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
  require(a >= 1, ErrorKind::data, std::string(what) + ": empty input");
}

}  // namespace detail

inline double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  detail::check_same_length(pred.size(), truth.size(), "rmse");
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

/// Root mean squared percentage error, in percent.
inline double rmspe(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  detail::check_same_length(pred.size(), truth.size(), "rmspe");
  detail::require((truth.array().abs() >= 1e-12).all(), ErrorKind::data,
                  "rmspe: truth has an entry with |t| < 1e-12");
  const Eigen::ArrayXd pct = 100.0 * (pred - truth).array() / truth.array();
  return std::sqrt(pct.square().mean());
}

/// sqrt((y - mu)^T S^{-1} (y - mu)) through a (jittered) Cholesky solve.
inline double mahalanobis(const Eigen::VectorXd& truth, const Eigen::VectorXd& mean,
                          const Eigen::MatrixXd& cov) {
  detail::check_same_length(truth.size(), mean.size(), "mahalanobis");
  detail::require(cov.rows() == truth.size() && cov.cols() == truth.size(), ErrorKind::data,
                  "mahalanobis: covariance size mismatch");
  const Eigen::MatrixXd L = jittered_cholesky(cov);
  return L.triangularView<Eigen::Lower>().solve(truth - mean).norm();
}

/// mean(-(mean - truth)^2 / var - log var); larger is better.
inline double proper_score(const Eigen::VectorXd& truth, const Eigen::VectorXd& mean,
                           const Eigen::VectorXd& var) {
  detail::check_same_length(truth.size(), mean.size(), "proper_score");
  detail::check_same_length(truth.size(), var.size(), "proper_score");
  detail::require((var.array() > 0.0).all(), ErrorKind::data,
                  "proper_score: variances must be positive");
  return (-(mean - truth).array().square() / var.array() - var.array().log()).mean();
}

}  // namespace lagp
