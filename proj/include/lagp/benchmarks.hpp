#pragma once

// Test functions, Latin hypercube designs and the random 2d path generator.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagp/error.hpp"
#include "lagp/random.hpp"

namespace lagp {

namespace detail {

template <class V>
void require_unit_cube(const Eigen::MatrixBase<V>& x, const char* what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    require(x(i) >= 0.0 && x(i) <= 1.0, ErrorKind::data,
            std::string(what) + ": input outside [0,1]");
  }
}

}  // namespace detail

/// Borehole flow rate with inputs on [0,1]^8 in the order
/// (rw, r, Tu, Hu, Tl, Hl, L, Kw); r spans [100, 50000].
template <class V>
double borehole(const Eigen::MatrixBase<V>& x) {
  detail::require(x.size() == 8, ErrorKind::data, "borehole takes 8 inputs");
  detail::require_unit_cube(x, "borehole");
  const double rw = x(0) * (0.15 - 0.05) + 0.05;
  const double r = x(1) * (50000.0 - 100.0) + 100.0;
  const double Tu = x(2) * (115600.0 - 63070.0) + 63070.0;
  const double Hu = x(3) * (1110.0 - 990.0) + 990.0;
  const double Tl = x(4) * (116.0 - 63.1) + 63.1;
  const double Hl = x(5) * (820.0 - 700.0) + 700.0;
  const double L = x(6) * (1680.0 - 1120.0) + 1120.0;
  const double Kw = x(7) * (12045.0 - 9855.0) + 9855.0;
  const double m1 = 2.0 * std::numbers::pi * Tu * (Hu - Hl);
  const double m2 = std::log(r / rw);
  const double m3 = 1.0 + 2.0 * L * Tu / (m2 * rw * rw * Kw) + Tu / Tl;
  return m1 / m2 / m3;
}

/// -sum_i sin(x_i) sin^(2M)(i x_i^2 / pi) on [0, pi]^p.
template <class V>
double michalewicz(const Eigen::MatrixBase<V>& x, double M = 10.0) {
  detail::require(M > 0.0, ErrorKind::usage, "michalewicz needs M > 0");
  detail::require(x.size() >= 1, ErrorKind::data, "michalewicz needs p >= 1");
  double f = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    detail::require(xi >= 0.0 && xi <= std::numbers::pi, ErrorKind::data,
                    "michalewicz: input outside [0, pi]");
    const double s = std::sin(static_cast<double>(i + 1) * xi * xi / std::numbers::pi);
    f -= std::sin(xi) * std::pow(s * s, M);
  }
  return f;
}

/// Smooth multimodal surface on [-2,2]^2 used for the path experiments:
/// exp(-(a^2+b^2)/8)(cos 2a + cos 2b) + 0.5 exp(-(a^2+b^2)/2) cos(3(a+b)).
/// Even in (a,b); equals 2.5 at the origin.
template <class V>
double test_function_2d(const Eigen::MatrixBase<V>& x) {
  detail::require(x.size() == 2, ErrorKind::data, "test_function_2d takes 2 inputs");
  const double a = x(0), b = x(1);
  const double r2 = a * a + b * b;
  return std::exp(-r2 / 8.0) * (std::cos(2.0 * a) + std::cos(2.0 * b)) +
         0.5 * std::exp(-r2 / 2.0) * std::cos(3.0 * (a + b));
}

/// Latin hypercube on [0,1]^p: each column is a random permutation of the N
/// cells with a uniform offset inside each cell.
inline Eigen::MatrixXd lhs_design(Eigen::Index N, Eigen::Index p, std::uint64_t seed) {
  detail::require(N >= 1 && p >= 1, ErrorKind::usage, "lhs_design needs N >= 1 and p >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd X(N, p);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(N));
  for (Eigen::Index k = 0; k < p; ++k) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index i = 0; i < N; ++i) {
      X(i, k) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + unif(rng)) /
                static_cast<double>(N);
    }
  }
  return X;
}

/// Regular grid with `per_side` points per coordinate over [lo, hi]^2.
inline Eigen::MatrixXd grid_2d(Eigen::Index per_side, double lo, double hi) {
  detail::require(per_side >= 2 && hi > lo, ErrorKind::usage, "grid_2d needs >= 2 points per side");
  Eigen::MatrixXd X(per_side * per_side, 2);
  const double h = (hi - lo) / static_cast<double>(per_side - 1);
  for (Eigen::Index i = 0; i < per_side; ++i) {
    for (Eigen::Index j = 0; j < per_side; ++j) {
      X(i * per_side + j, 0) = lo + h * static_cast<double>(i);
      X(i * per_side + j, 1) = lo + h * static_cast<double>(j);
    }
  }
  return X;
}

enum class LineType { linear, quadratic, cubic, exponential, natural_log };

inline constexpr std::array<LineType, 5> kLineTypes = {LineType::linear, LineType::quadratic,
                                                       LineType::cubic, LineType::exponential,
                                                       LineType::natural_log};

inline std::string to_string(LineType t) {
  switch (t) {
    case LineType::linear: return "linear";
    case LineType::quadratic: return "quadratic";
    case LineType::cubic: return "cubic";
    case LineType::exponential: return "exponential";
    case LineType::natural_log: return "log";
  }
  return "?";
}

struct Rect {
  double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
};

struct PathSpec {
  int resolution = 100;
  Rect rect;
  double min_inside_fraction = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(resolution >= 2, ErrorKind::usage, "path resolution must be >= 2");
    detail::require(min_inside_fraction > 0.0 && min_inside_fraction <= 1.0, ErrorKind::usage,
                    "min_inside_fraction must lie in (0, 1]");
    detail::require(rect.xmax > rect.xmin && rect.ymax > rect.ymin, ErrorKind::usage,
                    "path rectangle is empty");
  }
};

struct Path {
  LineType type = LineType::linear;
  Eigen::MatrixXd points;  // resolution x 2
  int attempts = 0;
};

/// Base curve from the origin, t in [0,1], each axis normalized to [0,1].
inline Eigen::MatrixXd base_curve(LineType type, int resolution) {
  Eigen::MatrixXd P(resolution, 2);
  const double ymax = type == LineType::exponential   ? std::exp(1.0) - 1.0
                      : type == LineType::natural_log ? std::log(2.0)
                                                      : 1.0;
  for (int i = 0; i < resolution; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(resolution - 1);
    double y = t;
    switch (type) {
      case LineType::linear: y = t; break;
      case LineType::quadratic: y = t * t; break;
      case LineType::cubic: y = t * t * t; break;
      case LineType::exponential: y = std::exp(t) - 1.0; break;
      case LineType::natural_log: y = std::log1p(t); break;
    }
    P(i, 0) = t;
    P(i, 1) = y / ymax;
  }
  return P;
}

inline double inside_fraction(const Eigen::MatrixXd& P, const Rect& r) {
  Eigen::Index in = 0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    in += (P(i, 0) >= r.xmin && P(i, 0) <= r.xmax && P(i, 1) >= r.ymin && P(i, 1) <= r.ymax);
  }
  return static_cast<double>(in) / static_cast<double>(P.rows());
}

/// One random path. The curve type is uniform over the five kinds; each axis
/// is scaled by U(0.25, 1) times the shorter rectangle side, reflected with
/// probability 1/2 and shifted uniformly within the rectangle. Draws are
/// rejected until the inside fraction is met (at most 1000 attempts).
inline Path random_path(const PathSpec& spec, Rng& rng) {
  spec.validate();
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kLineTypes.size()) - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Rect& r = spec.rect;
  const double side = std::min(r.xmax - r.xmin, r.ymax - r.ymin);
  Path out;
  out.type = kLineTypes[static_cast<std::size_t>(pick(rng))];
  const Eigen::MatrixXd base = base_curve(out.type, spec.resolution);
  for (int attempt = 1; attempt <= 1000; ++attempt) {
    const double sx = (0.25 + 0.75 * unif(rng)) * side * (unif(rng) < 0.5 ? -1.0 : 1.0);
    const double sy = (0.25 + 0.75 * unif(rng)) * side * (unif(rng) < 0.5 ? -1.0 : 1.0);
    const double ox = r.xmin + unif(rng) * (r.xmax - r.xmin);
    const double oy = r.ymin + unif(rng) * (r.ymax - r.ymin);
    Eigen::MatrixXd P(base.rows(), 2);
    P.col(0) = (base.col(0).array() * sx + ox).matrix();
    P.col(1) = (base.col(1).array() * sy + oy).matrix();
    if (inside_fraction(P, r) >= spec.min_inside_fraction) {
      out.points = std::move(P);
      out.attempts = attempt;
      return out;
    }
  }
  throw NumericalError("path generator exceeded 1000 rejection attempts");
}

/// `count` paths; path i uses its own seeded stream.
inline std::vector<Path> gen_paths_2d(const PathSpec& spec, int count) {
  detail::require(count >= 0, ErrorKind::usage, "path count must be nonnegative");
  std::vector<Path> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(spec.seed, streams::paths, static_cast<std::uint64_t>(i));
    out.push_back(random_path(spec, rng));
  }
  return out;
}

}  // namespace lagp
