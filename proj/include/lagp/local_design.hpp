#pragma once

// Pointwise local approximate GP: nearest-neighbour and greedy ALC sub-designs,
// optional local lengthscale MLE with a second design pass, and the batch
// predictor over many query locations.

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagp/alc.hpp"
#include "lagp/error.hpp"
#include "lagp/gp.hpp"
#include "lagp/mle.hpp"
#include "lagp/neighbors.hpp"
#include "lagp/parallel.hpp"

namespace lagp {

enum class DesignMethod { nn, alc };

struct SearchConfig {
  Eigen::Index n0 = 6;
  Eigen::Index n = 50;
  /// Nearest candidates searched (N'); clamped to the design size.
  Eigen::Index candidate_limit = 1000;
  DesignMethod method = DesignMethod::alc;
  bool local_mle = false;
  bool second_stage = false;
  KernelMode kernel_mode = KernelMode::separable;
  /// Per-coordinate weights of the neighbour metric; empty means Euclidean.
  Eigen::VectorXd metric_weights;
  /// Isotropic local MLE starts at the mean pairwise squared distance of the
  /// local subset instead of the incoming lengthscale.
  bool iso_init_from_subset = false;
  MleOptions mle;

  Eigen::Index effective_candidates(Eigen::Index N) const {
    return std::min(candidate_limit, N);
  }

  void validate(Eigen::Index N) const {
    detail::require(n0 >= 1, ErrorKind::usage, "n0 must be at least 1");
    detail::require(n0 <= n, ErrorKind::usage, "n0 must not exceed n");
    detail::require(n <= N, ErrorKind::usage,
                    "local design size n=" + std::to_string(n) + " exceeds N=" +
                        std::to_string(N));
    detail::require(n <= effective_candidates(N), ErrorKind::usage,
                    "candidate_limit must be at least n");
    detail::require(metric_weights.size() == 0 || (metric_weights.array() > 0.0).all(),
                    ErrorKind::usage, "metric weights must be positive");
  }
};

struct LocalDesign {
  Eigen::VectorXd center;
  IndexList indices;
  GPModel model;
  Hyperparams local_hyper;
  /// The search ran out of acceptable candidates before reaching n.
  bool search_exhausted = false;
  bool mle_converged = true;
};

/// Greedy ALC (or plain NN) local design around x. The first n0 indices are
/// the nearest neighbours of x; each further step adds the unused candidate
/// among the candidate_limit nearest that maximizes the variance reduction.
template <class V>
LocalDesign greedy_alc_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                              const Eigen::MatrixBase<V>& x, const SearchConfig& cfg,
                              const Hyperparams& hyper) {
  cfg.validate(X.rows());
  detail::check_dim(Y.size(), X.rows(), "greedy_alc_design responses");
  const Eigen::VectorXd center = detail::as_column(x);
  const IndexList near = nn_design(X, center, cfg.effective_candidates(X.rows()),
                                   cfg.metric_weights);

  if (cfg.method == DesignMethod::nn || cfg.n == cfg.n0) {
    IndexList idx(near.begin(), near.begin() + cfg.n);
    GPModel model = build_gp(take_rows(X, idx), take_entries(Y, idx), hyper);
    const Hyperparams used = model.hyper();
    return {center, std::move(idx), std::move(model), used};
  }

  IndexList idx(near.begin(), near.begin() + cfg.n0);
  GPModel model = build_gp(take_rows(X, idx), take_entries(Y, idx), hyper);
  AlcCandidateSearch search(X, model, IndexList(near.begin() + cfg.n0, near.end()),
                            center.transpose(), cfg.n);
  bool exhausted = false;
  for (Eigen::Index j = cfg.n0; j < cfg.n; ++j) {
    const auto pos = search.best();
    if (!pos) {
      exhausted = true;
      break;
    }
    const Eigen::Index row = search.candidates()[static_cast<std::size_t>(*pos)];
    search.add(*pos);
    idx.push_back(row);
    model = extend_gp(model, X.row(row), Y[row]);
  }
  const Hyperparams used = model.hyper();
  LocalDesign out{center, std::move(idx), std::move(model), used};
  out.search_exhausted = exhausted;
  return out;
}

/// Mean pairwise squared distance among the rows of X.
inline double mean_pairwise_sqdist(const Eigen::MatrixXd& X) {
  const std::vector<double> d = pairwise_sqdist(X);
  if (d.empty()) return 1.0;
  double s = 0.0;
  for (double v : d) s += v;
  return s / static_cast<double>(d.size());
}

/// Local lengthscale MLE on D_n(x); with `second_stage`, the design is rebuilt
/// from the n0-NN seed under the fitted lengthscales and refit once more.
inline LocalDesign local_mle_and_redesign(const LocalDesign& ld, const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& Y, const SearchConfig& cfg) {
  auto fit = [&](const IndexList& idx, Hyperparams init) {
    const Eigen::MatrixXd Xl = take_rows(X, idx);
    const Eigen::VectorXd yl = take_entries(Y, idx);
    if (cfg.kernel_mode == KernelMode::isotropic && cfg.iso_init_from_subset) {
      init = Hyperparams::isotropic(X.cols(), mean_pairwise_sqdist(Xl), init.nugget);
    }
    const LengthscaleBounds bounds = derive_bounds(Xl);
    init.lengthscales =
        init.lengthscales.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
    return mle_lengthscales(Xl, yl, init, bounds, cfg.kernel_mode, cfg.mle);
  };

  MleResult first = fit(ld.indices, ld.local_hyper);
  if (!cfg.second_stage) {
    GPModel model = build_gp(take_rows(X, ld.indices), take_entries(Y, ld.indices), first.hyper);
    LocalDesign out{ld.center, ld.indices, std::move(model), first.hyper};
    out.search_exhausted = ld.search_exhausted;
    out.mle_converged = first.converged;
    return out;
  }

  LocalDesign redesigned = greedy_alc_design(X, Y, ld.center, cfg, first.hyper);
  MleResult second = fit(redesigned.indices, first.hyper);
  GPModel model = build_gp(take_rows(X, redesigned.indices),
                           take_entries(Y, redesigned.indices), second.hyper);
  LocalDesign out{ld.center, std::move(redesigned.indices), std::move(model), second.hyper};
  out.search_exhausted = redesigned.search_exhausted;
  out.mle_converged = first.converged && second.converged;
  return out;
}

/// Full pointwise pipeline at one location: design, optional local MLE and
/// second stage, prediction.
template <class V>
LocalDesign fit_local(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                      const Eigen::MatrixBase<V>& x, const SearchConfig& cfg,
                      const Hyperparams& hyper) {
  LocalDesign ld = greedy_alc_design(X, Y, x, cfg, hyper);
  if (cfg.local_mle) return local_mle_and_redesign(ld, X, Y, cfg);
  return ld;
}

struct SurfacePrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale2;
  Eigen::VectorXi dof;
  /// Local lengthscales used at each point (one row per query).
  Eigen::MatrixXd lengthscales;
  /// Empty string for points that succeeded.
  std::vector<std::string> failures;
  int mle_unconverged = 0;

  std::size_t failure_count() const {
    std::size_t c = 0;
    for (const auto& f : failures) c += f.empty() ? 0 : 1;
    return c;
  }
};

/// Independent local predictions at every row of Xtest. Output is identical
/// for any number of threads; per-point failures are recorded, never thrown.
inline SurfacePrediction predict_surface(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                         const Eigen::MatrixXd& Xtest, const SearchConfig& cfg,
                                         const Hyperparams& hyper, unsigned threads = 1) {
  cfg.validate(X.rows());
  hyper.validate();
  detail::check_dim(Xtest.cols(), X.cols(), "predict_surface test inputs");
  detail::check_dim(Y.size(), X.rows(), "predict_surface responses");
  const Eigen::Index m = Xtest.rows();
  SurfacePrediction out;
  out.mean = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  out.scale2 = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  out.dof = Eigen::VectorXi::Zero(m);
  out.lengthscales = Eigen::MatrixXd::Constant(m, X.cols(), std::numeric_limits<double>::quiet_NaN());
  out.failures.assign(static_cast<std::size_t>(m), {});
  std::vector<char> unconverged(static_cast<std::size_t>(m), 0);

  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    try {
      const LocalDesign ld = fit_local(X, Y, Xtest.row(row), cfg, hyper);
      const Prediction p = predict_point(ld.model, Xtest.row(row));
      out.mean[row] = p.mean;
      out.scale2[row] = p.scale2;
      out.dof[row] = p.dof;
      out.lengthscales.row(row) = ld.local_hyper.lengthscales.transpose();
      unconverged[i] = ld.mle_converged ? 0 : 1;
    } catch (const std::exception& e) {
      out.failures[i] = e.what();
    }
  });
  for (char c : unconverged) out.mle_unconverged += c;
  return out;
}

}  // namespace lagp
