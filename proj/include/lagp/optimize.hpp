#pragma once

// Box-constrained quasi-Newton minimizer.
//
// Dense BFGS on the free variables with projection onto the box and an Armijo
// backtracking search along the projected path. The problems solved here have
// a handful of variables (lengthscales, candidate coordinates), so the dense
// inverse-Hessian approximation is cheaper than limited-memory bookkeeping.
// Stopping follows the L-BFGS-B conventions: projected-gradient infinity norm
// below `pgtol`, or relative objective reduction below `factr * eps`.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "lagp/error.hpp"

namespace lagp {

struct BoxOptions {
  int max_iter = 200;
  double pgtol = 1e-6;
  double factr = 1e7;
  int max_backtracks = 40;
};

enum class BoxStatus {
  converged_pgtol,
  converged_ftol,
  max_iterations,
  line_search_failed,
};

struct BoxResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  BoxStatus status = BoxStatus::max_iterations;

  bool converged() const {
    return status == BoxStatus::converged_pgtol || status == BoxStatus::converged_ftol;
  }
};

/// Objective returns f(x) and writes the gradient into `grad`. Non-finite
/// values mark infeasible points; the line search backs away from them.
using BoxObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

inline Eigen::VectorXd project_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

/// Infinity norm of the projected gradient (zero at a constrained stationary point).
inline double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                      const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (gi < 0.0) {
      gi = std::max(x[i] - upper[i], gi);
    } else {
      gi = std::min(x[i] - lower[i], gi);
    }
    norm = std::max(norm, std::abs(gi));
  }
  return norm;
}

inline BoxResult minimize_box(const BoxObjective& objective, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              const BoxOptions& opts = {}) {
  const Eigen::Index n = x0.size();
  detail::require(lower.size() == n && upper.size() == n, ErrorKind::usage,
                  "box bounds must match the starting point dimension");
  detail::require((lower.array() <= upper.array()).all(), ErrorKind::usage,
                  "box lower bound exceeds upper bound");

  BoxResult res;
  res.x = project_to_box(x0, lower, upper);
  Eigen::VectorXd g(n);
  res.value = objective(res.x, g);
  res.evaluations = 1;
  if (!std::isfinite(res.value)) {
    res.status = BoxStatus::line_search_failed;
    return res;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;  // H is the identity
  Eigen::VectorXd g_new(n);

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    if (projected_gradient_norm(res.x, g, lower, upper) <= opts.pgtol) {
      res.status = BoxStatus::converged_pgtol;
      return res;
    }

    // Variables pinned at a bound with the gradient pushing outward stay fixed.
    Eigen::VectorXd free = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lower = res.x[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = res.x[i] >= upper[i] && g[i] < 0.0;
      if (at_lower || at_upper) free[i] = 0.0;
    }
    const Eigen::VectorXd gf = g.cwiseProduct(free);
    Eigen::VectorXd d = -(free.asDiagonal() * H * gf);
    if (gf.dot(d) >= 0.0 || !d.allFinite()) {
      H.setIdentity();
      fresh = true;
      d = -gf;
    }
    if (d.squaredNorm() == 0.0) {
      res.status = BoxStatus::converged_pgtol;
      return res;
    }

    // First step along steepest descent is limited to unit length.
    double step = fresh ? std::min(1.0, 1.0 / d.lpNorm<Eigen::Infinity>()) : 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = project_to_box(res.x + step * d, lower, upper);
      const Eigen::VectorXd s = x_new - res.x;
      if (s.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = objective(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && g_new.allFinite() &&
          f_new <= res.value + 1e-4 * g.dot(s)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!fresh) {
        H.setIdentity();
        fresh = true;
        continue;
      }
      res.status = BoxStatus::line_search_failed;
      return res;
    }

    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double f_old = res.value;
    res.x = x_new;
    res.value = f_new;
    g = g_new;

    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (fresh) {
        // Scale the initial approximation before the first update.
        H *= sy / y.squaredNorm();
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
      fresh = false;
    }

    const double scale = std::max({std::abs(f_old), std::abs(f_new), 1.0});
    if ((f_old - f_new) <= opts.factr * eps * scale) {
      res.status = projected_gradient_norm(res.x, g, lower, upper) <= opts.pgtol
                       ? BoxStatus::converged_pgtol
                       : BoxStatus::converged_ftol;
      ++res.iterations;
      return res;
    }
  }
  res.status = BoxStatus::max_iterations;
  return res;
}

}  // namespace lagp
