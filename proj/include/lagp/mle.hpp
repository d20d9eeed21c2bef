#pragma once

// Maximum likelihood lengthscales with a fixed nugget, optimized in log-theta
// space under data-derived box bounds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "lagp/error.hpp"
#include "lagp/gp.hpp"
#include "lagp/optimize.hpp"

namespace lagp {

struct LengthscaleBounds {
  double lower = 1e-6;
  double upper = 1e6;
};

/// Squared pairwise distances among (at most `max_rows`, evenly strided) rows.
inline std::vector<double> pairwise_sqdist(const Eigen::MatrixXd& X,
                                           Eigen::Index max_rows = 1000) {
  const Eigen::Index n = X.rows();
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n + max_rows - 1) / max_rows);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < n; i += stride) rows.push_back(i);
  std::vector<double> d;
  d.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      d.push_back((X.row(rows[a]) - X.row(rows[b])).squaredNorm());
    }
  }
  return d;
}

/// Empirical quantile (type 7 interpolation) of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
  detail::require(!v.empty(), ErrorKind::usage, "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// lower = 1e-3 x (5% quantile of positive squared distances), upper = 10 x max.
inline LengthscaleBounds derive_bounds(const Eigen::MatrixXd& X) {
  std::vector<double> d = pairwise_sqdist(X);
  std::erase_if(d, [](double v) { return !(v > 0.0); });
  if (d.empty()) return {};
  const double q05 = quantile(d, 0.05);
  const double dmax = *std::max_element(d.begin(), d.end());
  return {1e-3 * q05, 10.0 * dmax};
}

struct MleOptions {
  int max_iter = 200;
  double gtol = 1e-6;
  double factr = 1e7;
};

struct MleResult {
  Hyperparams hyper;
  double loglik = -std::numeric_limits<double>::infinity();
  double loglik_init = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Maximizes the log marginal likelihood over the lengthscales. Isotropic mode
/// ties all coordinates to one lengthscale (initialized at the geometric mean
/// of `init`). Returns the best iterate; `converged` is false when the
/// optimizer hit its iteration cap or stalled.
inline MleResult mle_lengthscales(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Hyperparams& init, const LengthscaleBounds& bounds,
                                  KernelMode mode = KernelMode::separable,
                                  const MleOptions& opts = {}) {
  init.validate();
  detail::check_dim(X.cols(), init.dim(), "mle_lengthscales");
  detail::require(bounds.lower > 0.0 && bounds.upper >= bounds.lower &&
                      std::isfinite(bounds.upper),
                  ErrorKind::usage, "lengthscale bounds must be finite and positive");
  const Eigen::Index p = X.cols();
  const Eigen::Index nvar = mode == KernelMode::isotropic ? 1 : p;
  const double eta = init.nugget;

  auto to_hyper = [&](const Eigen::VectorXd& logt) {
    if (mode == KernelMode::isotropic) {
      return Hyperparams::isotropic(p, std::exp(logt[0]), eta);
    }
    return Hyperparams(logt.array().exp().matrix(), eta);
  };

  Eigen::VectorXd start(nvar);
  if (mode == KernelMode::isotropic) {
    start[0] = init.lengthscales.array().log().mean();
  } else {
    start = init.lengthscales.array().log().matrix();
  }
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(nvar, std::log(bounds.lower));
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(nvar, std::log(bounds.upper));
  start = project_to_box(start, lo, hi);

  MleResult res;
  {
    const GPModel m0 = build_gp(X, y, to_hyper(start), false);
    res.loglik_init = log_marginal_likelihood(m0);
  }

  BoxObjective objective = [&](const Eigen::VectorXd& logt, Eigen::VectorXd& grad) {
    try {
      const GPModel m = build_gp(X, y, to_hyper(logt), false);
      grad = -log_likelihood_gradient(m, mode);
      return -log_marginal_likelihood(m);
    } catch (const NumericalError&) {
      grad = Eigen::VectorXd::Zero(logt.size());
      return std::numeric_limits<double>::infinity();
    }
  };

  BoxOptions bo;
  bo.max_iter = opts.max_iter;
  bo.pgtol = opts.gtol;
  bo.factr = opts.factr;
  const BoxResult br = minimize_box(objective, start, lo, hi, bo);

  res.iterations = br.iterations;
  res.converged = br.converged();
  if (std::isfinite(br.value) && -br.value >= res.loglik_init) {
    res.hyper = to_hyper(br.x);
    res.loglik = -br.value;
  } else {
    res.hyper = to_hyper(start);
    res.loglik = res.loglik_init;
  }
  return res;
}

}  // namespace lagp
