#pragma once

// Local design for a whole reference set W (a trajectory): exhaustive joint
// ALC, derivative-based joint ALC with snapping onto the design, and the
// joint-NN baseline. Also joint prediction draws along W.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "lagp/alc.hpp"
#include "lagp/error.hpp"
#include "lagp/gp.hpp"
#include "lagp/neighbors.hpp"
#include "lagp/optimize.hpp"
#include "lagp/random.hpp"

namespace lagp {

enum class PathMethod { alc_ex, alc_opt, nn_joint };

inline std::string to_string(PathMethod m) {
  switch (m) {
    case PathMethod::alc_ex: return "alc-ex";
    case PathMethod::alc_opt: return "alc-opt";
    case PathMethod::nn_joint: return "nn-joint";
  }
  return "?";
}

inline PathMethod parse_path_method(const std::string& s) {
  if (s == "alc-ex") return PathMethod::alc_ex;
  if (s == "alc-opt") return PathMethod::alc_opt;
  if (s == "nn-joint") return PathMethod::nn_joint;
  throw UsageError("unknown path method '" + s + "'");
}

struct PathSearchConfig {
  Eigen::Index n0 = 6;
  Eigen::Index n = 50;
  /// Candidates nearest to W; 0 selects min(N, 10 n sqrt|W|) capped at 1e4.
  Eigen::Index candidate_limit = 0;
  PathMethod method = PathMethod::alc_opt;
  int max_iter = 100;
  double pgtol = 0.1;
  /// Search box; empty means the per-coordinate range of the design.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index effective_candidates(Eigen::Index N, Eigen::Index nw) const {
    if (candidate_limit > 0) return std::min(candidate_limit, N);
    const double rule = 10.0 * static_cast<double>(n) * std::sqrt(static_cast<double>(nw));
    const auto c = static_cast<Eigen::Index>(std::min(rule, 1e4));
    return std::min(N, std::max(c, n));
  }

  void validate(Eigen::Index N, Eigen::Index nw) const {
    detail::require(nw >= 1, ErrorKind::usage, "reference set is empty");
    detail::require(n0 >= 1 && n0 <= n, ErrorKind::usage, "need 1 <= n0 <= n");
    detail::require(n <= N, ErrorKind::usage,
                    "local design size n=" + std::to_string(n) + " exceeds N=" +
                        std::to_string(N));
    detail::require(n <= effective_candidates(N, nw), ErrorKind::usage,
                    "candidate_limit must be at least n");
    detail::require(max_iter >= 0 && pgtol >= 0.0, ErrorKind::usage,
                    "optimizer controls must be nonnegative");
    detail::require(lower.size() == upper.size(), ErrorKind::usage,
                    "search box bounds must both be given");
  }
};

/// Per-coordinate min and max of the design rows.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> data_hull(const Eigen::MatrixXd& X) {
  return {X.colwise().minCoeff().transpose(), X.colwise().maxCoeff().transpose()};
}

struct CandidateOptimum {
  Eigen::VectorXd x;
  double log_value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  /// Criterion at the start was below 1e-300; x is the start.
  bool underflow = false;
  bool converged = false;
};

/// Maximizes log of the joint criterion over a box, from `start`.
inline CandidateOptimum optimize_candidate(const JointAlc& crit, const Eigen::VectorXd& start,
                                           const Eigen::VectorXd& lower,
                                           const Eigen::VectorXd& upper, int max_iter,
                                           double pgtol) {
  detail::check_dim(start.size(), lower.size(), "optimize_candidate start");
  CandidateOptimum out;
  out.x = project_to_box(start, lower, upper);
  const auto v0 = crit.value(out.x);
  if (!v0 || !(*v0 >= 1e-300)) {
    out.underflow = true;
    if (v0 && *v0 > 0.0) out.log_value = std::log(*v0);
    return out;
  }
  out.log_value = std::log(*v0);

  BoxObjective objective = [&](const Eigen::VectorXd& c, Eigen::VectorXd& grad) {
    Eigen::VectorXd g;
    const auto v = crit.value_and_gradient(c, g);
    if (!v || !(*v > 0.0)) {
      grad = Eigen::VectorXd::Zero(c.size());
      return std::numeric_limits<double>::infinity();
    }
    grad = -g / *v;
    return -std::log(*v);
  };
  BoxOptions bo;
  bo.max_iter = max_iter;
  bo.pgtol = pgtol;
  const BoxResult br = minimize_box(objective, out.x, lower, upper, bo);
  out.iterations = br.iterations;
  out.evaluations = br.evaluations;
  out.converged = br.converged();
  if (std::isfinite(br.value) && -br.value >= out.log_value) {
    out.x = br.x;
    out.log_value = -br.value;
  }
  return out;
}

/// Nearest row of X (Euclidean) to x among `pool` entries not yet used;
/// ties go to the lowest row index. Returns the position within `pool`.
template <class V>
std::optional<std::size_t> snap_position(const Eigen::MatrixXd& X, const Eigen::MatrixBase<V>& x,
                                         const IndexList& pool, const std::vector<bool>& used) {
  std::optional<std::size_t> best;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (used[i]) continue;
    const double d = detail::metric_sqdist(X.row(pool[i]), x, Eigen::VectorXd());
    if (d < bd || (d == bd && pool[i] < pool[*best])) {
      bd = d;
      best = i;
    }
  }
  return best;
}

/// Nearest unused row of X to x. `used` holds row indices.
template <class V>
Eigen::Index snap_to_candidate(const Eigen::MatrixXd& X, const Eigen::MatrixBase<V>& x,
                               const IndexList& used) {
  detail::check_dim(x.size(), X.cols(), "snap_to_candidate");
  std::vector<bool> taken(static_cast<std::size_t>(X.rows()), false);
  for (Eigen::Index i : used) {
    detail::require(i >= 0 && i < X.rows(), ErrorKind::usage, "used index out of range");
    taken[static_cast<std::size_t>(i)] = true;
  }
  IndexList all(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
  const auto pos = snap_position(X, x, all, taken);
  if (!pos) throw UsageError("snap_to_candidate: every design row is used");
  return all[*pos];
}

/// All design rows ordered by distance to the closest element of W.
inline IndexList init_stack(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
  return nearest_to_set(X, W, X.rows());
}

struct PathDesign {
  IndexList indices;
  GPModel model;
  bool search_exhausted = false;
  /// Optimizer iterations summed over steps (alc-opt only).
  int optimizer_iterations = 0;
  int underflows = 0;
};

/// Greedy local design for the set W.
///
/// The candidate pool is the candidate_limit rows nearest to W, ordered by
/// that distance; its first n0 rows seed every method. alc-opt pops starts off
/// the pool order, optimizes the log criterion over the box and snaps the
/// optimum onto the nearest unused pool row; the snapped row is removed from
/// the start stack as well.
inline PathDesign greedy_joint_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                      const Eigen::MatrixXd& W, const PathSearchConfig& cfg,
                                      const Hyperparams& hyper) {
  cfg.validate(X.rows(), W.rows());
  detail::check_dim(W.cols(), X.cols(), "greedy_joint_design reference set");
  detail::check_dim(Y.size(), X.rows(), "greedy_joint_design responses");
  detail::check_finite(W, "reference set");
  const IndexList pool = nearest_to_set(X, W, cfg.effective_candidates(X.rows(), W.rows()));

  if (cfg.method == PathMethod::nn_joint || cfg.n == cfg.n0) {
    IndexList idx(pool.begin(), pool.begin() + cfg.n);
    GPModel model = build_gp(take_rows(X, idx), take_entries(Y, idx), hyper);
    return {std::move(idx), std::move(model)};
  }

  IndexList idx(pool.begin(), pool.begin() + cfg.n0);
  GPModel model = build_gp(take_rows(X, idx), take_entries(Y, idx), hyper);
  PathDesign out{{}, model};

  if (cfg.method == PathMethod::alc_ex) {
    AlcCandidateSearch search(X, model, IndexList(pool.begin() + cfg.n0, pool.end()), W, cfg.n);
    for (Eigen::Index j = cfg.n0; j < cfg.n; ++j) {
      const auto pos = search.best();
      if (!pos) {
        out.search_exhausted = true;
        break;
      }
      const Eigen::Index row = search.candidates()[static_cast<std::size_t>(*pos)];
      search.add(*pos);
      idx.push_back(row);
      model = extend_gp(model, X.row(row), Y[row]);
    }
  } else {
    Eigen::VectorXd lo = cfg.lower, hi = cfg.upper;
    if (lo.size() == 0) std::tie(lo, hi) = data_hull(X);
    detail::check_dim(lo.size(), X.cols(), "search box");
    // used: in the design; stacked: still available as a start.
    std::vector<bool> used(pool.size(), false), popped(pool.size(), false);
    for (Eigen::Index i = 0; i < cfg.n0; ++i) {
      used[static_cast<std::size_t>(i)] = true;
      popped[static_cast<std::size_t>(i)] = true;
    }
    std::size_t top = 0;
    for (Eigen::Index j = cfg.n0; j < cfg.n; ++j) {
      while (top < pool.size() && popped[top]) ++top;
      Eigen::VectorXd start;
      if (top < pool.size()) {
        start = X.row(pool[top]).transpose();
        popped[top] = true;
      } else {
        start = W.colwise().mean().transpose();
      }
      const JointAlc crit(model, W);
      const CandidateOptimum opt = optimize_candidate(crit, start, lo, hi, cfg.max_iter, cfg.pgtol);
      out.optimizer_iterations += opt.iterations;
      out.underflows += opt.underflow ? 1 : 0;
      const auto pos = snap_position(X, opt.x, pool, used);
      if (!pos) {
        out.search_exhausted = true;
        break;
      }
      used[*pos] = true;
      popped[*pos] = true;
      const Eigen::Index row = pool[*pos];
      idx.push_back(row);
      model = extend_gp(model, X.row(row), Y[row]);
    }
  }
  out.indices = std::move(idx);
  out.model = std::move(model);
  return out;
}

/// Multivariate Student-t draws, one row per draw: mean + sqrt(dof / chi2) L z
/// with L L^T = scale.
inline Eigen::MatrixXd student_t_draws(const Eigen::VectorXd& mean, const Eigen::MatrixXd& scale,
                                       int dof, Eigen::Index n_draws, std::uint64_t seed) {
  detail::require(n_draws >= 0, ErrorKind::usage, "n_draws must be nonnegative");
  detail::require(dof >= 1, ErrorKind::usage, "Student-t draws need dof >= 1");
  detail::check_dim(scale.rows(), mean.size(), "student_t_draws scale");
  const Eigen::MatrixXd L = jittered_cholesky(scale);
  const Eigen::Index nw = mean.size();
  Rng rng = make_rng(seed, streams::draws);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(static_cast<double>(dof));
  Eigen::MatrixXd out(n_draws, nw);
  Eigen::VectorXd z(nw);
  for (Eigen::Index d = 0; d < n_draws; ++d) {
    for (Eigen::Index i = 0; i < nw; ++i) z[i] = normal(rng);
    const double s = std::sqrt(static_cast<double>(dof) / chi2(rng));
    out.row(d) = (mean + s * (L * z)).transpose();
  }
  return out;
}

/// Draws from the joint predictive law over W (dof = n).
inline Eigen::MatrixXd sample_paths(const GPModel& model, const Eigen::MatrixXd& W,
                                    Eigen::Index n_draws, std::uint64_t seed) {
  const JointPrediction jp = predict_joint(model, W);
  return student_t_draws(jp.mean, jp.cov, jp.dof, n_draws, seed);
}

}  // namespace lagp
