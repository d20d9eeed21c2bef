#pragma once

// Dense zero-mean GP with a separable Gaussian correlation and the scale tau^2
// integrated out under the reference prior. Predictive laws are Student-t with
// N degrees of freedom.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lagp/error.hpp"
#include "lagp/kernel.hpp"

namespace lagp {

/// Smallest admissible squared Cholesky pivot, relative to 1 + nugget.
inline constexpr double kMinPivot = 1e-12;

struct Prediction {
  double mean = 0.0;
  double scale2 = 0.0;
  int dof = 0;

  /// Predictive variance scale2 * N / (N - 2); +infinity when N <= 2.
  double variance() const {
    if (dof <= 2) return std::numeric_limits<double>::infinity();
    return scale2 * dof / (dof - 2.0);
  }
};

struct JointPrediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // Student-t scale matrix
  int dof = 0;
};

namespace detail {

inline void check_finite(const Eigen::MatrixXd& M, const char* what) {
  require(M.allFinite(), ErrorKind::data, std::string(what) + " contains NaN or Inf");
}

inline bool pivots_ok(const Eigen::MatrixXd& L, double nugget) {
  const double tol = kMinPivot * (1.0 + nugget);
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const double d = L(i, i);
    if (!(d * d > tol)) return false;
  }
  return true;
}

}  // namespace detail

class GPModel {
 public:
  const Eigen::MatrixXd& design() const { return X_; }
  const Eigen::VectorXd& responses() const { return y_; }
  const Hyperparams& hyper() const { return hyper_; }
  /// Lower-triangular Cholesky factor of K_N (nugget on the diagonal).
  const Eigen::MatrixXd& chol() const { return L_; }
  const Eigen::MatrixXd& inverse() const { return Ki_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double psi() const { return psi_; }
  double log_det() const { return log_det_; }
  Eigen::Index size() const { return X_.rows(); }
  Eigen::Index dim() const { return X_.cols(); }
  /// Number of x10 nugget inflations applied to get a factorization.
  int nugget_raises() const { return nugget_raises_; }

  friend GPModel build_gp(Eigen::MatrixXd X, Eigen::VectorXd y, const Hyperparams& hyper,
                          bool allow_nugget_raise);
  friend GPModel extend_gp(const GPModel& model, const Eigen::RowVectorXd& x_new,
                           double y_new);

 private:
  GPModel() = default;

  void finish_solves() {
    const Eigen::VectorXd z = L_.triangularView<Eigen::Lower>().solve(y_);
    alpha_ = L_.transpose().triangularView<Eigen::Upper>().solve(z);
    psi_ = z.squaredNorm();
  }

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  Hyperparams hyper_;
  Eigen::MatrixXd L_;
  Eigen::MatrixXd Ki_;
  Eigen::VectorXd alpha_;
  double psi_ = 0.0;
  double log_det_ = 0.0;
  int nugget_raises_ = 0;
};

/// Fits the GP. On a failed factorization with a positive nugget, the nugget
/// is multiplied by 10 up to three times before giving up.
inline GPModel build_gp(Eigen::MatrixXd X, Eigen::VectorXd y, const Hyperparams& hyper,
                        bool allow_nugget_raise = true) {
  hyper.validate();
  detail::require(X.rows() >= 1, ErrorKind::data, "design needs at least one row");
  detail::check_dim(X.cols(), hyper.dim(), "build_gp design");
  detail::check_dim(y.size(), X.rows(), "build_gp responses");
  detail::check_finite(X, "design");
  detail::check_finite(y, "responses");

  GPModel m;
  m.X_ = std::move(X);
  m.y_ = std::move(y);
  m.hyper_ = hyper;

  const int max_raises = (allow_nugget_raise && hyper.nugget > 0.0) ? 3 : 0;
  for (int attempt = 0;; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(correlation_matrix(m.X_, m.hyper_));
    if (llt.info() == Eigen::Success && detail::pivots_ok(llt.matrixL(), m.hyper_.nugget)) {
      m.L_ = llt.matrixL();
      m.Ki_ = llt.solve(Eigen::MatrixXd::Identity(m.X_.rows(), m.X_.rows()));
      break;
    }
    if (attempt >= max_raises) {
      throw NumericalError("correlation matrix is not positive definite with nugget " +
                           std::to_string(m.hyper_.nugget) +
                           "; raise the nugget or remove duplicate design rows");
    }
    m.hyper_.nugget *= 10.0;
    m.nugget_raises_ = attempt + 1;
  }
  m.log_det_ = 2.0 * m.L_.diagonal().array().log().sum();
  m.finish_solves();
  return m;
}

/// Adds one observation with an O(N^2) Cholesky and partitioned-inverse update.
/// Falls back to a full rebuild when the new pivot is not safely positive; the
/// rebuild throws NumericalError if it also breaks down.
inline GPModel extend_gp(const GPModel& model, const Eigen::RowVectorXd& x_new,
                         double y_new) {
  detail::check_dim(x_new.size(), model.dim(), "extend_gp");
  detail::require(x_new.allFinite() && std::isfinite(y_new), ErrorKind::data,
                  "extend_gp: non-finite input");
  const Eigen::Index n = model.size();
  const Hyperparams& hyper = model.hyper_;

  Eigen::MatrixXd X(n + 1, model.dim());
  X.topRows(n) = model.X_;
  X.row(n) = x_new;
  Eigen::VectorXd y(n + 1);
  y.head(n) = model.y_;
  y[n] = y_new;

  const Eigen::VectorXd k = correlation_vector(model.X_, x_new, hyper);
  const Eigen::VectorXd l =
      model.L_.triangularView<Eigen::Lower>().solve(k);
  const double pivot2 = 1.0 + hyper.nugget - l.squaredNorm();
  if (!(pivot2 > kMinPivot * (1.0 + hyper.nugget))) {
    return build_gp(std::move(X), std::move(y), hyper, false);
  }

  GPModel m;
  m.hyper_ = hyper;
  m.nugget_raises_ = model.nugget_raises_;
  m.X_ = std::move(X);
  m.y_ = std::move(y);

  m.L_ = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.L_.topLeftCorner(n, n) = model.L_;
  m.L_.row(n).head(n) = l.transpose();
  m.L_(n, n) = std::sqrt(pivot2);

  const Eigen::VectorXd u = model.Ki_ * k;
  const double v = pivot2;
  m.Ki_.resize(n + 1, n + 1);
  m.Ki_.topLeftCorner(n, n) = model.Ki_ + (u * u.transpose()) / v;
  m.Ki_.col(n).head(n) = -u / v;
  m.Ki_.row(n).head(n) = -u.transpose() / v;
  m.Ki_(n, n) = 1.0 / v;

  m.log_det_ = model.log_det_ + std::log(pivot2);
  m.finish_solves();
  return m;
}

/// log of Gamma(N/2) (2 pi)^{-N/2} |K|^{-1/2} (psi/2)^{-N/2}.
inline double log_marginal_likelihood(const GPModel& model) {
  const double n = static_cast<double>(model.size());
  const double psi = std::max(model.psi(), std::numeric_limits<double>::min());
  return std::lgamma(0.5 * n) - 0.5 * n * std::log(2.0 * std::numbers::pi) -
         0.5 * model.log_det() - 0.5 * n * std::log(0.5 * psi);
}

/// Gradient of the log marginal likelihood with respect to log lengthscales.
/// Separable: one entry per coordinate. Isotropic: a single entry for the
/// shared lengthscale (the sum of the separable entries).
inline Eigen::VectorXd log_likelihood_gradient(const GPModel& model, KernelMode mode) {
  const Eigen::Index n = model.size();
  const Eigen::Index p = model.dim();
  const Eigen::MatrixXd& X = model.design();
  const Eigen::MatrixXd& Ki = model.inverse();
  const Eigen::VectorXd& a = model.alpha();
  const Eigen::VectorXd& theta = model.hyper().lengthscales;
  const double psi = std::max(model.psi(), std::numeric_limits<double>::min());
  const double data_weight = static_cast<double>(n) / (2.0 * psi);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double d = X(i, k) - X(j, k);
        s += d * d / theta[k];
      }
      const double kij = std::exp(-s);
      // Symmetric pair counted twice.
      const double w = 2.0 * kij * (-0.5 * Ki(i, j) + data_weight * a[i] * a[j]);
      for (Eigen::Index k = 0; k < p; ++k) {
        const double d = X(i, k) - X(j, k);
        grad[k] += w * d * d / theta[k];
      }
    }
  }
  if (mode == KernelMode::isotropic) {
    return Eigen::VectorXd::Constant(1, grad.sum());
  }
  return grad;
}

template <class V>
Prediction predict_point(const GPModel& model, const Eigen::MatrixBase<V>& x) {
  detail::check_dim(x.size(), model.dim(), "predict_point");
  const Eigen::VectorXd k = correlation_vector(model.design(), x, model.hyper());
  Prediction out;
  out.mean = k.dot(model.alpha());
  const double reduction =
      model.chol().triangularView<Eigen::Lower>().solve(k).squaredNorm();
  const double n = static_cast<double>(model.size());
  out.scale2 = std::max(0.0, model.psi() * (1.0 - reduction) / n);
  out.dof = static_cast<int>(model.size());
  return out;
}

/// Joint predictive law over the rows of W.
inline JointPrediction predict_joint(const GPModel& model, const Eigen::MatrixXd& W) {
  detail::require(W.rows() >= 1, ErrorKind::usage, "prediction set is empty");
  detail::check_dim(W.cols(), model.dim(), "predict_joint");
  const Eigen::MatrixXd kW = cross_correlation(model.design(), W, model.hyper());
  const Eigen::MatrixXd LikW = model.chol().triangularView<Eigen::Lower>().solve(kW);
  Hyperparams no_nugget = model.hyper();
  no_nugget.nugget = 0.0;
  const Eigen::MatrixXd KWW = cross_correlation(W, W, no_nugget);

  const double scale = model.psi() / static_cast<double>(model.size());
  JointPrediction out;
  out.mean = kW.transpose() * model.alpha();
  out.cov = scale * (KWW - LikW.transpose() * LikW);
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    // Same arithmetic as predict_point so the diagonals agree.
    const double reduction = LikW.col(i).squaredNorm();
    out.cov(i, i) = std::max(0.0, model.psi() * (1.0 - reduction) /
                                      static_cast<double>(model.size()));
  }
  out.dof = static_cast<int>(model.size());
  return out;
}

/// Cholesky factor of a covariance matrix. Tries the matrix as given, then
/// adds 1e-10 * trace / n to the diagonal, growing x10 up to three times.
inline Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& S) {
  detail::require(S.rows() == S.cols() && S.rows() >= 1, ErrorKind::data,
                  "covariance must be square and nonempty");
  detail::check_finite(S, "covariance");
  const Eigen::Index n = S.rows();
  const double base = 1e-10 * std::max(S.trace(), 0.0) / static_cast<double>(n);
  for (int k = -1; k <= 3; ++k) {
    Eigen::MatrixXd A = S;
    if (k >= 0) A.diagonal().array() += base * std::pow(10.0, k);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
      return llt.matrixL();
    }
  }
  throw NumericalError("covariance factorization failed after jitter escalation");
}

}  // namespace lagp
