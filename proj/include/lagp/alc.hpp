#pragma once

// Active learning Cohn (ALC) criteria: reduction in tau^2-free predictive
// variance at a reference location, or averaged over a reference set W, from
// adding one candidate to the current design.
//
// With k_c = k_j(c), u = K_j^{-1} k_c, v_c = 1 + eta - k_c^T u and
// r_w = K(c, w) - k_j(w)^T u, the reduction at w is r_w^2 / v_c. Expanding the
// square gives the familiar G_j / g_j form; the squared form is kept because
// it is nonnegative by construction.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lagp/error.hpp"
#include "lagp/gp.hpp"
#include "lagp/kernel.hpp"
#include "lagp/neighbors.hpp"

namespace lagp {

/// Candidates whose own predictive variance is at or below this are rejected.
inline constexpr double kCandidateTol = 1e-12;

/// Evaluates the joint criterion and its gradient for one model and one W.
/// Works through triangular solves with the model's Cholesky factor, which
/// keeps the small candidate variances accurate. Precomputes L^{-1} K_j(., W)
/// so each evaluation is O(j^2 + j |W| p).
class JointAlc {
 public:
  JointAlc(const GPModel& model, const Eigen::MatrixXd& W)
      : model_(model), W_(W) {
    detail::require(W.rows() >= 1, ErrorKind::usage, "reference set is empty");
    detail::check_dim(W.cols(), model.dim(), "joint ALC reference set");
    LkW_ = model.chol().triangularView<Eigen::Lower>().solve(
        cross_correlation(model.design(), W, model.hyper()));
  }

  /// Mean variance reduction over W, or nullopt for a rejected candidate.
  std::optional<double> value(const Eigen::VectorXd& c) const {
    detail::check_dim(c.size(), model_.dim(), "joint ALC candidate");
    const Eigen::VectorXd l = lsolve(correlation_vector(model_.design(), c, model_.hyper()));
    const double v = 1.0 + model_.hyper().nugget - l.squaredNorm();
    if (!(v > kCandidateTol)) return std::nullopt;
    const Eigen::VectorXd r = correlation_vector(W_, c, model_.hyper()) - LkW_.transpose() * l;
    return r.squaredNorm() / (static_cast<double>(W_.rows()) * v);
  }

  /// Criterion value plus its gradient with respect to the candidate location.
  std::optional<double> value_and_gradient(const Eigen::VectorXd& c,
                                           Eigen::VectorXd& grad) const {
    detail::check_dim(c.size(), model_.dim(), "joint ALC candidate");
    const Eigen::MatrixXd& X = model_.design();
    const Eigen::VectorXd& theta = model_.hyper().lengthscales;
    const Eigen::VectorXd kc = correlation_vector(X, c, model_.hyper());
    const Eigen::VectorXd l = lsolve(kc);
    const double v = 1.0 + model_.hyper().nugget - l.squaredNorm();
    if (!(v > kCandidateTol)) return std::nullopt;
    const Eigen::VectorXd kcw = correlation_vector(W_, c, model_.hyper());
    const Eigen::VectorXd r = kcw - LkW_.transpose() * l;
    const double nw = static_cast<double>(W_.rows());
    const double rr = r.squaredNorm();

    // Column l of dK holds d k_j(c) / d c_l.
    Eigen::MatrixXd dK(X.rows(), c.size());
    for (Eigen::Index d = 0; d < c.size(); ++d) {
      dK.col(d) = kc.cwiseProduct(((X.col(d).array() - c[d]) * (2.0 / theta[d])).matrix());
    }
    const Eigen::MatrixXd LdK = model_.chol().triangularView<Eigen::Lower>().solve(dK);
    grad.resize(c.size());
    for (Eigen::Index d = 0; d < c.size(); ++d) {
      const Eigen::VectorXd dkw =
          kcw.cwiseProduct(((W_.col(d).array() - c[d]) * (2.0 / theta[d])).matrix());
      // dv/dc_d = -a
      const double a = 2.0 * LdK.col(d).dot(l);
      const Eigen::VectorXd dr = dkw - LkW_.transpose() * LdK.col(d);
      grad[d] = (2.0 * r.dot(dr) / v + rr * a / (v * v)) / nw;
    }
    return rr / (nw * v);
  }

  const GPModel& model() const { return model_; }
  const Eigen::MatrixXd& reference() const { return W_; }

 private:
  Eigen::VectorXd lsolve(const Eigen::VectorXd& k) const {
    return model_.chol().triangularView<Eigen::Lower>().solve(k);
  }

  const GPModel& model_;
  Eigen::MatrixXd W_;
  Eigen::MatrixXd LkW_;
};

namespace detail {

template <class A>
Eigen::VectorXd as_column(const Eigen::MatrixBase<A>& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
  return out;
}

}  // namespace detail

/// v_j(x) - v_{j+1}(x) from adding `candidate` to the model's design.
template <class A, class B>
std::optional<double> alc_reduction(const GPModel& model, const Eigen::MatrixBase<A>& x,
                                    const Eigen::MatrixBase<B>& candidate) {
  const Eigen::MatrixXd W = detail::as_column(x).transpose();
  return JointAlc(model, W).value(detail::as_column(candidate));
}

/// Average over the rows of W of the pointwise reduction.
template <class B>
std::optional<double> joint_alc_reduction(const GPModel& model, const Eigen::MatrixXd& W,
                                          const Eigen::MatrixBase<B>& candidate) {
  return JointAlc(model, W).value(detail::as_column(candidate));
}

template <class B>
std::optional<Eigen::VectorXd> joint_alc_gradient(const GPModel& model,
                                                  const Eigen::MatrixXd& W,
                                                  const Eigen::MatrixBase<B>& candidate) {
  Eigen::VectorXd grad;
  if (!JointAlc(model, W).value_and_gradient(detail::as_column(candidate), grad)) {
    return std::nullopt;
  }
  return grad;
}

/// Incremental exhaustive ALC search over a fixed, discrete candidate set.
///
/// Keeps K_j(., C), K_j^{-1} K_j(., C), candidate variances and
/// K_j(., W)^T K_j^{-1} K_j(., C) current under rank-one updates, so adding a
/// design point costs O((j + |W|) |C|) rather than O(j^2 |C|).
class AlcCandidateSearch {
 public:
  AlcCandidateSearch(const Eigen::MatrixXd& X, const GPModel& seed, IndexList candidates,
                     const Eigen::MatrixXd& W, Eigen::Index max_design)
      : X_(X), hyper_(seed.hyper()), cand_(std::move(candidates)) {
    detail::check_dim(W.cols(), X.cols(), "ALC reference set");
    const Eigen::Index nc = static_cast<Eigen::Index>(cand_.size());
    const Eigen::Index j0 = seed.size();
    rows_ = j0;
    const Eigen::Index cap = std::max(max_design, j0);
    const Eigen::MatrixXd C = take_rows(X, cand_);

    Kc_.resize(cap, nc);
    U_.resize(cap, nc);
    Kc_.topRows(j0) = cross_correlation(seed.design(), C, hyper_);
    U_.topRows(j0) = seed.inverse() * Kc_.topRows(j0);
    v_ = (1.0 + hyper_.nugget) -
         (Kc_.topRows(j0).cwiseProduct(U_.topRows(j0))).colwise().sum().transpose().array();
    const Eigen::MatrixXd kW = cross_correlation(seed.design(), W, hyper_);
    Q_ = kW.transpose() * U_.topRows(j0);
    KcW_ = cross_correlation(W, C, hyper_);
    active_.assign(cand_.size(), true);
  }

  const IndexList& candidates() const { return cand_; }
  Eigen::Index design_size() const { return rows_; }

  /// Criterion for candidate position `pos` (nullopt if used or rejected).
  std::optional<double> score(Eigen::Index pos) const {
    if (!active_[static_cast<std::size_t>(pos)] || !(v_[pos] > kCandidateTol)) {
      return std::nullopt;
    }
    const double rr = (KcW_.col(pos) - Q_.col(pos)).squaredNorm();
    return rr / (static_cast<double>(KcW_.rows()) * v_[pos]);
  }

  /// Position of the best remaining candidate; ties go to the lower design
  /// row index. nullopt when every candidate is used or rejected.
  std::optional<Eigen::Index> best() const {
    std::optional<Eigen::Index> arg;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index pos = 0; pos < static_cast<Eigen::Index>(cand_.size()); ++pos) {
      const auto s = score(pos);
      if (!s) continue;
      const std::size_t sp = static_cast<std::size_t>(pos);
      if (*s > best || (*s == best && cand_[sp] < cand_[static_cast<std::size_t>(*arg)])) {
        best = *s;
        arg = pos;
      }
    }
    return arg;
  }

  /// Position of a design row index in the candidate list, if present.
  std::optional<Eigen::Index> position_of(Eigen::Index row) const {
    for (std::size_t i = 0; i < cand_.size(); ++i) {
      if (cand_[i] == row) return static_cast<Eigen::Index>(i);
    }
    return std::nullopt;
  }

  bool is_active(Eigen::Index pos) const { return active_[static_cast<std::size_t>(pos)]; }

  /// Moves candidate `pos` into the design.
  void add(Eigen::Index pos) {
    detail::require(is_active(pos), ErrorKind::usage, "candidate already in the design");
    detail::require(rows_ < Kc_.rows(), ErrorKind::usage, "design capacity exceeded");
    const double v = v_[pos];
    detail::require(v > kCandidateTol, ErrorKind::numerical,
                    "candidate is indistinguishable from the current design");
    const Eigen::Index j = rows_;
    const Eigen::Index nc = static_cast<Eigen::Index>(cand_.size());
    const Eigen::RowVectorXd xnew = X_.row(cand_[static_cast<std::size_t>(pos)]);

    Eigen::RowVectorXd kappa(nc);
    for (Eigen::Index c = 0; c < nc; ++c) {
      kappa[c] = std::exp(-detail::scaled_sqdist(X_.row(cand_[static_cast<std::size_t>(c)]),
                                                 xnew, hyper_.lengthscales));
    }
    const Eigen::VectorXd unew = U_.col(pos).head(j);
    const Eigen::RowVectorXd h = unew.transpose() * Kc_.topRows(j);
    const Eigen::RowVectorXd delta = (kappa - h) / v;  // new row of U

    const Eigen::VectorXd qnew = Q_.col(pos);
    Eigen::VectorXd kappaW(KcW_.rows());
    for (Eigen::Index w = 0; w < KcW_.rows(); ++w) kappaW[w] = KcW_(w, pos);

    U_.topRows(j).noalias() -= unew * delta;
    U_.row(j) = delta;
    Kc_.row(j) = kappa;
    v_ -= (v * delta.array().square()).transpose();
    Q_.noalias() -= (qnew - kappaW) * delta;

    rows_ = j + 1;
    active_[static_cast<std::size_t>(pos)] = false;
  }

 private:
  const Eigen::MatrixXd& X_;
  Hyperparams hyper_;
  IndexList cand_;
  Eigen::Index rows_ = 0;
  Eigen::MatrixXd Kc_;
  Eigen::MatrixXd U_;
  Eigen::ArrayXd v_;
  Eigen::MatrixXd Q_;
  Eigen::MatrixXd KcW_;
  std::vector<bool> active_;
};

}  // namespace lagp
