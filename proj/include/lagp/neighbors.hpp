#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lagp/error.hpp"

namespace lagp {

using IndexList = std::vector<Eigen::Index>;

namespace detail {

/// Squared distance, optionally weighted per coordinate (empty = Euclidean).
template <class A, class B>
double metric_sqdist(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y,
                     const Eigen::VectorXd& weights) {
  double s = 0.0;
  if (weights.size() == 0) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double d = x(k) - y(k);
      s += d * d;
    }
  } else {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double d = x(k) - y(k);
      s += weights[k] * d * d;
    }
  }
  return s;
}

/// Indices of the `count` smallest keys, ordered by (key, index).
inline IndexList smallest_by_key(const std::vector<double>& key, Eigen::Index count) {
  std::vector<std::pair<double, Eigen::Index>> order(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    order[i] = {key[i], static_cast<Eigen::Index>(i)};
  }
  const auto mid = order.begin() + count;
  if (mid != order.end()) std::nth_element(order.begin(), mid, order.end());
  std::sort(order.begin(), mid);
  IndexList out;
  out.reserve(static_cast<std::size_t>(count));
  for (auto it = order.begin(); it != mid; ++it) out.push_back(it->second);
  return out;
}

}  // namespace detail

/// The n design rows nearest to x; ties go to the lower row index. `weights`
/// rescales each squared coordinate difference (empty means Euclidean).
template <class V>
IndexList nn_design(const Eigen::MatrixXd& X, const Eigen::MatrixBase<V>& x, Eigen::Index n,
                    const Eigen::VectorXd& weights = {}) {
  detail::require(n >= 0 && n <= X.rows(), ErrorKind::usage,
                  "nn_design: requested " + std::to_string(n) + " neighbours from " +
                      std::to_string(X.rows()) + " rows");
  detail::require(x.size() == X.cols(), ErrorKind::data, "nn_design: dimension mismatch");
  std::vector<double> d(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    d[static_cast<std::size_t>(i)] = detail::metric_sqdist(X.row(i), x, weights);
  }
  return detail::smallest_by_key(d, n);
}

/// Squared distance from every design row to its closest element of W.
inline std::vector<double> min_sqdist_to_set(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                                             const Eigen::VectorXd& weights = {}) {
  detail::require(W.cols() == X.cols(), ErrorKind::data,
                  "min_sqdist_to_set: dimension mismatch");
  std::vector<double> d(static_cast<std::size_t>(X.rows()),
                        std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index w = 0; w < W.rows(); ++w) {
      best = std::min(best, detail::metric_sqdist(X.row(i), W.row(w), weights));
    }
    d[static_cast<std::size_t>(i)] = best;
  }
  return d;
}

/// The `count` rows with the smallest distance to any element of W.
inline IndexList nearest_to_set(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                                Eigen::Index count, const Eigen::VectorXd& weights = {}) {
  detail::require(count >= 0 && count <= X.rows(), ErrorKind::usage,
                  "nearest_to_set: count exceeds design size");
  return detail::smallest_by_key(min_sqdist_to_set(X, W, weights), count);
}

/// Gathers rows of X (and entries of y) in index order.
inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const IndexList& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
  return out;
}

inline Eigen::VectorXd take_entries(const Eigen::VectorXd& y, const IndexList& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[idx[i]];
  return out;
}

}  // namespace lagp
