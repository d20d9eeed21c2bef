#pragma once

// Global lengthscales from block Latin hypercube subsamples (and the random
// subsample baseline), aggregated over bootstrap repetitions, plus the input
// prescaling that conditions local fits on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagp/error.hpp"
#include "lagp/gp.hpp"
#include "lagp/mle.hpp"
#include "lagp/neighbors.hpp"
#include "lagp/parallel.hpp"
#include "lagp/random.hpp"

namespace lagp {

enum class Aggregator { median, mean };
enum class SubsampleMode { blhs, random };

struct SubsampleSpec {
  /// Blocks per dimension; 0 picks the smallest m with expected size <= 1000.
  int m = 0;
  int bootstrap_count = 30;
  Aggregator aggregator = Aggregator::median;
  SubsampleMode mode = SubsampleMode::blhs;
  std::uint64_t seed = 0;
};

/// Smallest m whose expected subsample size N m^(1-d) is at most `target`.
inline int auto_blocks(Eigen::Index N, Eigen::Index d, double target = 1000.0) {
  if (d <= 1) return 1;
  int m = 1;
  while (static_cast<double>(N) * std::pow(static_cast<double>(m), 1.0 - static_cast<double>(d)) >
         target) {
    ++m;
  }
  return m;
}

inline double expected_blhs_size(Eigen::Index N, Eigen::Index d, int m) {
  return static_cast<double>(N) * std::pow(static_cast<double>(m), 1.0 - static_cast<double>(d));
}

struct ColumnRange {
  Eigen::VectorXd lo;
  Eigen::VectorXd width;
};

/// Column ranges; zero-width columns get width 1.
inline ColumnRange column_range(const Eigen::MatrixXd& X) {
  ColumnRange r;
  r.lo = X.colwise().minCoeff().transpose();
  r.width = X.colwise().maxCoeff().transpose() - r.lo;
  for (Eigen::Index k = 0; k < r.width.size(); ++k) {
    if (!(r.width[k] > 0.0)) r.width[k] = 1.0;
  }
  return r;
}

/// Interval of u in [0,1] among m equal ones. Boundaries belong to the lower
/// interval; 0 belongs to the first.
inline int block_level(double u, int m) {
  const int idx = static_cast<int>(std::ceil(u * m)) - 1;
  return std::clamp(idx, 0, m - 1);
}

struct BlhsDraw {
  IndexList rows;
  /// levels(b, k): interval of block b in dimension k.
  Eigen::MatrixXi levels;
};

namespace detail {

inline BlhsDraw blhs_once(const Eigen::MatrixXd& U, int m, Rng& rng) {
  const Eigen::Index d = U.cols();
  BlhsDraw out;
  out.levels.resize(m, d);
  // Inverse of the first permutation: level in dimension 0 -> block.
  std::vector<int> block_of(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int b = 0; b < m; ++b) out.levels(b, k) = perm[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < m; ++b) block_of[static_cast<std::size_t>(out.levels(b, 0))] = b;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const int b = block_of[static_cast<std::size_t>(block_level(U(i, 0), m))];
    bool inside = true;
    for (Eigen::Index k = 1; k < d && inside; ++k) {
      inside = block_level(U(i, k), m) == out.levels(b, k);
    }
    if (inside) out.rows.push_back(i);
  }
  return out;
}

}  // namespace detail

/// One block LH subsample. Columns are mapped to [0,1] by their range first.
inline BlhsDraw blhs_subsample(const Eigen::MatrixXd& X, int m, std::uint64_t seed) {
  detail::require(m >= 1, ErrorKind::usage, "m must be at least 1");
  detail::require(X.rows() >= 1, ErrorKind::data, "design is empty");
  const ColumnRange r = column_range(X);
  const Eigen::MatrixXd U =
      ((X.rowwise() - r.lo.transpose()).array().rowwise() / r.width.transpose().array()).matrix();
  Rng rng(seed);
  for (int attempt = 0; attempt < 2; ++attempt) {
    BlhsDraw d = detail::blhs_once(U, m, rng);
    if (!d.rows.empty()) return d;
  }
  throw DataError("block LH subsample is empty twice in a row; lower m");
}

/// `size` distinct rows drawn uniformly, returned in ascending order.
inline IndexList random_subsample(Eigen::Index N, Eigen::Index size, std::uint64_t seed) {
  detail::require(size >= 1, ErrorKind::usage, "subsample size must be at least 1");
  detail::require(size <= N, ErrorKind::usage,
                  "subsample size " + std::to_string(size) + " exceeds N=" + std::to_string(N));
  IndexList all(static_cast<std::size_t>(N));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  IndexList out;
  out.reserve(static_cast<std::size_t>(size));
  Rng rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(out), size, rng);
  return out;
}

struct GlobalScale {
  Eigen::VectorXd lengthscales;
  /// One row per bootstrap repetition; NaN rows for failed fits.
  Eigen::MatrixXd provenance;
  std::vector<Eigen::Index> subsample_sizes;
  int failures = 0;
  int m = 1;
};

/// Starting lengthscale for MLE: 10% quantile of pairwise squared distances.
inline double default_lengthscale(const Eigen::MatrixXd& X) {
  std::vector<double> d = pairwise_sqdist(X);
  std::erase_if(d, [](double v) { return !(v > 0.0); });
  if (d.empty()) return 1.0;
  return quantile(d, 0.1);
}

inline double median_of(std::vector<double> v) {
  detail::require(!v.empty(), ErrorKind::usage, "median of an empty sample");
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double upper = v[h];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lower + upper);
}

/// Separable MLE lengthscales on B subsamples, aggregated per coordinate.
/// Random mode draws subsamples of size round(N m^(1-d)) to match BLHS. All
/// fits share the bounds and start derived from the full design. Lengthscales
/// are in the units of X.
inline GlobalScale bootstrap_lengthscales(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                          const SubsampleSpec& spec, double nugget = kDefaultNugget,
                                          unsigned threads = 1) {
  detail::require(spec.bootstrap_count >= 1, ErrorKind::usage, "bootstrap count must be >= 1");
  detail::check_dim(Y.size(), X.rows(), "bootstrap_lengthscales responses");
  const Eigen::Index N = X.rows();
  const Eigen::Index d = X.cols();
  const int m = spec.m > 0 ? spec.m : auto_blocks(N, d);
  const LengthscaleBounds bounds = derive_bounds(X);
  const Hyperparams init = Hyperparams::isotropic(
      d, std::clamp(default_lengthscale(X), bounds.lower, bounds.upper), nugget);
  const auto matched = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(expected_blhs_size(N, d, m))), 1, N);

  const auto B = static_cast<std::size_t>(spec.bootstrap_count);
  GlobalScale out;
  out.m = m;
  out.provenance = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(B), d,
                                             std::numeric_limits<double>::quiet_NaN());
  out.subsample_sizes.assign(B, 0);
  std::vector<char> ok(B, 0);

  parallel_for(B, threads, [&](std::size_t b) {
    const std::uint64_t s = derive_seed(spec.seed, streams::subsample, b);
    const IndexList rows = spec.mode == SubsampleMode::blhs ? blhs_subsample(X, m, s).rows
                                                            : random_subsample(N, matched, s);
    out.subsample_sizes[b] = static_cast<Eigen::Index>(rows.size());
    try {
      const MleResult r = mle_lengthscales(take_rows(X, rows), take_entries(Y, rows), init,
                                           bounds, KernelMode::separable);
      out.provenance.row(static_cast<Eigen::Index>(b)) = r.hyper.lengthscales.transpose();
      ok[b] = 1;
    } catch (const NumericalError&) {
    }
  });

  for (char c : ok) out.failures += c ? 0 : 1;
  if (2 * out.failures > spec.bootstrap_count) {
    throw NumericalError(std::to_string(out.failures) + " of " +
                         std::to_string(spec.bootstrap_count) + " bootstrap fits failed");
  }
  out.lengthscales.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<double> col;
    for (std::size_t b = 0; b < B; ++b) {
      if (ok[b]) col.push_back(out.provenance(static_cast<Eigen::Index>(b), k));
    }
    out.lengthscales[k] = spec.aggregator == Aggregator::median
                              ? median_of(col)
                              : std::accumulate(col.begin(), col.end(), 0.0) /
                                    static_cast<double>(col.size());
  }
  return out;
}

/// Divides column j by sqrt(theta_j).
inline Eigen::MatrixXd prescale(const Eigen::MatrixXd& X, const Eigen::VectorXd& theta) {
  detail::check_dim(theta.size(), X.cols(), "prescale");
  detail::require((theta.array() > 0.0).all() && theta.allFinite(), ErrorKind::usage,
                  "prescale lengthscales must be positive");
  return (X.array().rowwise() / theta.transpose().array().sqrt()).matrix();
}

/// Inverse of prescale.
inline Eigen::MatrixXd unprescale(const Eigen::MatrixXd& Z, const Eigen::VectorXd& theta) {
  detail::check_dim(theta.size(), Z.cols(), "unprescale");
  return (Z.array().rowwise() * theta.transpose().array().sqrt()).matrix();
}

}  // namespace lagp
