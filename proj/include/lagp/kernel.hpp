#pragma once

// Separable Gaussian correlation K(x, x') = exp{-sum_k (x_k - x'_k)^2 / theta_k}.
//
// Lengthscales are squared-distance decay rates, so theta has units of input^2.
// Isotropic kernels are represented by equal lengthscales in every coordinate.
// The nugget only ever enters on the diagonal of a design-vs-itself matrix and
// is identified by row index, never by comparing coordinates.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "lagp/error.hpp"

namespace lagp {

enum class KernelMode { isotropic, separable };

inline constexpr double kDefaultNugget = 1e-6;

struct Hyperparams {
  Eigen::VectorXd lengthscales;
  double nugget = kDefaultNugget;

  Hyperparams() = default;
  Hyperparams(Eigen::VectorXd theta, double eta)
      : lengthscales(std::move(theta)), nugget(eta) {}

  static Hyperparams isotropic(Eigen::Index dim, double theta,
                               double eta = kDefaultNugget) {
    return {Eigen::VectorXd::Constant(dim, theta), eta};
  }

  Eigen::Index dim() const { return lengthscales.size(); }

  void validate() const {
    detail::require(lengthscales.size() > 0, ErrorKind::usage,
                    "hyperparameters need at least one lengthscale");
    for (Eigen::Index k = 0; k < lengthscales.size(); ++k) {
      detail::require(std::isfinite(lengthscales[k]) && lengthscales[k] > 0.0,
                      ErrorKind::usage,
                      "lengthscale " + std::to_string(k) + " must be positive");
    }
    detail::require(std::isfinite(nugget) && nugget >= 0.0, ErrorKind::usage,
                    "nugget must be nonnegative");
  }
};

namespace detail {

inline void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  require(got == want, ErrorKind::data,
          std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
              ", expected " + std::to_string(want) + ")");
}

template <class A, class B>
double scaled_sqdist(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y,
                     const Eigen::VectorXd& theta) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double d = x(k) - y(k);
    s += d * d / theta[k];
  }
  return s;
}

}  // namespace detail

/// Correlation between two points, without nugget. Value in (0, 1].
template <class A, class B>
double correlation(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y,
                   const Hyperparams& hyper) {
  detail::check_dim(x.size(), hyper.dim(), "correlation");
  detail::check_dim(y.size(), hyper.dim(), "correlation");
  for (Eigen::Index k = 0; k < hyper.dim(); ++k) {
    detail::require(hyper.lengthscales[k] > 0.0, ErrorKind::usage,
                    "lengthscales must be positive");
  }
  return std::exp(-detail::scaled_sqdist(x, y, hyper.lengthscales));
}

/// Correlation matrix of a design with itself; nugget on the diagonal.
inline Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& X,
                                          const Hyperparams& hyper) {
  detail::check_dim(X.cols(), hyper.dim(), "correlation_matrix");
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = 1.0 + hyper.nugget;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v =
          std::exp(-detail::scaled_sqdist(X.row(i), X.row(j), hyper.lengthscales));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

/// Cross-correlations between rows of A and rows of B (A.rows x B.rows), no nugget.
inline Eigen::MatrixXd cross_correlation(const Eigen::MatrixXd& A,
                                         const Eigen::MatrixXd& B,
                                         const Hyperparams& hyper) {
  detail::check_dim(A.cols(), hyper.dim(), "cross_correlation");
  detail::check_dim(B.cols(), hyper.dim(), "cross_correlation");
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      K(i, j) = std::exp(-detail::scaled_sqdist(A.row(i), B.row(j), hyper.lengthscales));
    }
  }
  return K;
}

/// Correlations between every row of X and one point x.
template <class V>
Eigen::VectorXd correlation_vector(const Eigen::MatrixXd& X,
                                   const Eigen::MatrixBase<V>& x,
                                   const Hyperparams& hyper) {
  detail::check_dim(X.cols(), hyper.dim(), "correlation_vector");
  detail::check_dim(x.size(), hyper.dim(), "correlation_vector");
  Eigen::VectorXd k(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    k[i] = std::exp(-detail::scaled_sqdist(X.row(i), x, hyper.lengthscales));
  }
  return k;
}

}  // namespace lagp
