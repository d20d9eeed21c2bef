#pragma once

// Desk-scale experiment drivers shared by the CLI bench command and the
// acceptance suite: the comparator grid on borehole / Michalewicz, and the
// path-prediction comparison in 2d and 4d. Results are tidy rows
// (comparator, rep, metric, value).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagp/benchmarks.hpp"
#include "lagp/blhs.hpp"
#include "lagp/csv.hpp"
#include "lagp/gp.hpp"
#include "lagp/local_design.hpp"
#include "lagp/metrics.hpp"
#include "lagp/mle.hpp"
#include "lagp/parallel.hpp"
#include "lagp/path_design.hpp"
#include "lagp/pipeline.hpp"
#include "lagp/random.hpp"

namespace lagp {

struct MetricRow {
  std::string comparator;
  int rep = 0;
  std::string metric;
  double value = 0.0;

  bool operator==(const MetricRow&) const = default;
};

inline void print_rows(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "comparator,rep,metric,value\n";
  for (const auto& r : rows) {
    out << r.comparator << ',' << r.rep << ',' << r.metric << ',' << format_real(r.value) << '\n';
  }
}

/// Median of `metric` for `comparator`; NaN if absent.
inline double median_metric(const std::vector<MetricRow>& rows, const std::string& comparator,
                            const std::string& metric) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.comparator == comparator && r.metric == metric && std::isfinite(r.value)) {
      v.push_back(r.value);
    }
  }
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : median_of(v);
}

/// Per (comparator, metric): count and the 0.1 / 0.5 / 0.9 quantiles, in
/// first-appearance order.
inline void print_summary(std::ostream& out, const std::vector<MetricRow>& rows) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<double>> vals;
  for (const auto& r : rows) {
    auto k = std::make_pair(r.comparator, r.metric);
    if (!vals.contains(k)) keys.push_back(k);
    if (std::isfinite(r.value)) vals[k].push_back(r.value);
  }
  out << "comparator,metric,count,q10,median,q90\n";
  for (const auto& k : keys) {
    const auto& v = vals[k];
    out << k.first << ',' << k.second << ',' << v.size();
    for (double q : {0.1, 0.5, 0.9}) out << ',' << format_real(v.empty() ? NAN : quantile(v, q));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Comparator grid on a test function

struct GridBenchConfig {
  Eigen::Index n_train = 10000;
  Eigen::Index n_test = 1000;
  int reps = 5;
  std::uint64_t seed = 0;
  FitOptions fit;
  /// Empty means all 18.
  std::vector<MethodSpec> methods;
};

namespace detail {

template <class F>
std::vector<MetricRow> surface_grid(const GridBenchConfig& cfg, Eigen::Index p, double span,
                                    F&& fn) {
  detail::require(cfg.reps >= 1, ErrorKind::usage, "reps must be at least 1");
  detail::require(cfg.n_train >= cfg.fit.n && cfg.n_test >= 1, ErrorKind::usage,
                  "training set smaller than the local design");
  const std::vector<MethodSpec> methods = cfg.methods.empty() ? method_grid() : cfg.methods;
  std::vector<MetricRow> rows;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const auto r = static_cast<std::uint64_t>(rep);
    // Train and test come from one joint LHS, split in row order.
    const Eigen::MatrixXd D =
        span * lhs_design(cfg.n_train + cfg.n_test, p, derive_seed(cfg.seed, streams::design, r));
    const Eigen::MatrixXd X = D.topRows(cfg.n_train);
    const Eigen::MatrixXd Xt = D.bottomRows(cfg.n_test);
    Eigen::VectorXd Y(X.rows()), Yt(Xt.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) Y[i] = fn(X.row(i));
    for (Eigen::Index i = 0; i < Xt.rows(); ++i) Yt[i] = fn(Xt.row(i));

    FitOptions fo = cfg.fit;
    fo.seed = derive_seed(cfg.seed, streams::replicate, r);
    // One global estimate per prescale mode and replicate, shared by methods.
    std::map<PrescaleMode, Eigen::VectorXd> scale;
    for (const MethodSpec& m : methods) {
      if (m.prescale == PrescaleMode::none || scale.contains(m.prescale)) continue;
      const auto t0 = std::chrono::steady_clock::now();
      scale[m.prescale] = global_lengthscales(m, X, Y, fo);
      rows.push_back({m.prescale == PrescaleMode::random ? "global.s" : "global.sb", rep,
                      "seconds", detail::seconds_since(t0)});
    }
    for (const MethodSpec& m : methods) {
      FitOptions mo = fo;
      if (m.prescale != PrescaleMode::none) mo.global_scale = scale.at(m.prescale);
      const FitResult fr = fit_predict(m, X, Y, Xt, Yt, mo);
      const std::string name = format_method(m);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rows.push_back({name, rep, "rmse", fr.rmse.value_or(nan)});
      rows.push_back({name, rep, "rmspe", fr.rmspe.value_or(nan)});
      rows.push_back({name, rep, "failures", static_cast<double>(fr.pred.failure_count())});
      rows.push_back({name, rep, "seconds", fr.seconds_local});
    }
  }
  return rows;
}

}  // namespace detail

/// Borehole on [0,1]^8.
inline std::vector<MetricRow> borehole_grid(const GridBenchConfig& cfg) {
  return detail::surface_grid(cfg, 8, 1.0, [](const auto& x) { return borehole(x); });
}

/// Michalewicz with p = 4, M = 10 on [0, pi]^4.
inline std::vector<MetricRow> michalewicz_grid(const GridBenchConfig& cfg) {
  return detail::surface_grid(cfg, 4, std::numbers::pi,
                              [](const auto& x) { return michalewicz(x, 10.0); });
}

// ---------------------------------------------------------------------------
// Path prediction

enum class PathComparator { alc_ex, alc_opt, nn_joint, alc_pw, nn_pw };

inline constexpr std::array<PathComparator, 5> kPathComparators = {
    PathComparator::alc_ex, PathComparator::alc_opt, PathComparator::nn_joint,
    PathComparator::alc_pw, PathComparator::nn_pw};

inline std::string to_string(PathComparator c) {
  switch (c) {
    case PathComparator::alc_ex: return "alc-ex";
    case PathComparator::alc_opt: return "alc-opt";
    case PathComparator::nn_joint: return "nn-joint";
    case PathComparator::alc_pw: return "alc-pw";
    case PathComparator::nn_pw: return "nn-pw";
  }
  return "?";
}

inline PathComparator parse_path_comparator(const std::string& s) {
  for (PathComparator c : kPathComparators) {
    if (to_string(c) == s) return c;
  }
  throw UsageError("unknown path method '" + s + "'");
}

struct PathPredictOptions {
  Eigen::Index n0 = 6;
  Eigen::Index n = 60;
  /// 0 = automatic (joint rule); pointwise methods fall back to 1000.
  Eigen::Index candidate_limit = 0;
};

struct PathPrediction {
  Eigen::VectorXd mean;
  /// Joint methods: Student-t scale matrix; pointwise: diag(scale2).
  Eigen::MatrixXd cov;
  int dof = 0;
  /// Present for joint methods.
  std::optional<GPModel> model;
  double seconds = 0.0;
};

/// Predicts along W with fixed hyperparameters (no local MLE).
inline PathPrediction predict_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                   const Eigen::MatrixXd& W, PathComparator c,
                                   const PathPredictOptions& opt, const Hyperparams& hyper) {
  const auto t0 = std::chrono::steady_clock::now();
  PathPrediction out;
  if (c == PathComparator::alc_pw || c == PathComparator::nn_pw) {
    SearchConfig cfg;
    cfg.n0 = opt.n0;
    cfg.n = opt.n;
    cfg.candidate_limit = opt.candidate_limit > 0 ? opt.candidate_limit : 1000;
    cfg.method = c == PathComparator::alc_pw ? DesignMethod::alc : DesignMethod::nn;
    cfg.local_mle = false;
    const SurfacePrediction sp = predict_surface(X, Y, W, cfg, hyper, 1);
    if (sp.failure_count() > 0) {
      const auto bad = std::find_if(sp.failures.begin(), sp.failures.end(),
                                    [](const std::string& s) { return !s.empty(); });
      throw NumericalError("pointwise path prediction failed: " + *bad);
    }
    out.mean = sp.mean;
    out.cov = sp.scale2.asDiagonal();
    out.dof = static_cast<int>(opt.n);
  } else {
    PathSearchConfig cfg;
    cfg.n0 = opt.n0;
    cfg.n = opt.n;
    cfg.candidate_limit = opt.candidate_limit;
    cfg.method = c == PathComparator::alc_ex    ? PathMethod::alc_ex
                 : c == PathComparator::alc_opt ? PathMethod::alc_opt
                                                : PathMethod::nn_joint;
    PathDesign pd = greedy_joint_design(X, Y, W, cfg, hyper);
    const JointPrediction jp = predict_joint(pd.model, W);
    out.mean = jp.mean;
    out.cov = jp.cov;
    out.dof = jp.dof;
    out.model = std::move(pd.model);
  }
  out.seconds = detail::seconds_since(t0);
  return out;
}

/// Fixed hyperparameters for path work: separable MLE on a random subset of
/// at most 1000 rows.
inline Hyperparams path_hyperparams(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                    std::uint64_t seed, double nugget = kDefaultNugget) {
  const IndexList rows =
      random_subsample(X.rows(), std::min<Eigen::Index>(X.rows(), 1000),
                       derive_seed(seed, streams::subsample, 0));
  const LengthscaleBounds b = derive_bounds(X);
  const Hyperparams init = Hyperparams::isotropic(
      X.cols(), std::clamp(default_lengthscale(take_rows(X, rows)), b.lower, b.upper), nugget);
  return mle_lengthscales(take_rows(X, rows), take_entries(Y, rows), init, b,
                          KernelMode::separable)
      .hyper;
}

struct PathBenchConfig {
  int dims = 2;
  /// Training size; 2d uses the nearest square grid on [-2,2]^2.
  Eigen::Index n_train = 10000;
  int paths = 20;
  int resolution = 100;
  PathPredictOptions predict;
  std::vector<PathComparator> comparators{kPathComparators.begin(), kPathComparators.end()};
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Product response for the 4d case.
template <class V>
double test_function_4d(const Eigen::MatrixBase<V>& x) {
  detail::require(x.size() == 4, ErrorKind::data, "test_function_4d takes 4 inputs");
  return test_function_2d(Eigen::Vector2d(x(0), x(1))) * test_function_2d(Eigen::Vector2d(x(2), x(3)));
}

/// Reference sets for the path benchmark. In 4d the 2d path runs in a random
/// pair of coordinates and the other two are fixed uniformly in [-2,2].
inline std::vector<Eigen::MatrixXd> bench_paths(int dims, int count, int resolution,
                                                std::uint64_t seed) {
  detail::require(dims == 2 || dims == 4, ErrorKind::usage, "path benchmark supports 2d or 4d");
  PathSpec spec;
  spec.resolution = resolution;
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, streams::paths, static_cast<std::uint64_t>(i));
    Path p = random_path(spec, rng);
    if (dims == 2) {
      out.push_back(std::move(p.points));
      continue;
    }
    std::array<int, 4> order = {0, 1, 2, 3};
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Eigen::MatrixXd W(p.points.rows(), 4);
    W.col(order[0]) = p.points.col(0);
    W.col(order[1]) = p.points.col(1);
    W.col(order[2]).setConstant(u(rng));
    W.col(order[3]).setConstant(u(rng));
    out.push_back(std::move(W));
  }
  return out;
}

struct PathBenchData {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  std::vector<Eigen::MatrixXd> paths;
  std::vector<Eigen::VectorXd> truth;
};

inline PathBenchData path_bench_data(const PathBenchConfig& cfg) {
  PathBenchData d;
  if (cfg.dims == 2) {
    const auto side = std::max<Eigen::Index>(
        2, std::llround(std::sqrt(static_cast<double>(cfg.n_train))));
    d.X = grid_2d(side, -2.0, 2.0);
  } else {
    d.X = (4.0 * lhs_design(cfg.n_train, 4, derive_seed(cfg.seed, streams::design, 0))).array() -
          2.0;
  }
  auto f = [&](const Eigen::RowVectorXd& x) {
    return cfg.dims == 2 ? test_function_2d(x) : test_function_4d(x);
  };
  d.Y.resize(d.X.rows());
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) d.Y[i] = f(d.X.row(i));
  d.paths = bench_paths(cfg.dims, cfg.paths, cfg.resolution, cfg.seed);
  for (const auto& W : d.paths) {
    Eigen::VectorXd t(W.rows());
    for (Eigen::Index i = 0; i < W.rows(); ++i) t[i] = f(W.row(i));
    d.truth.push_back(std::move(t));
  }
  return d;
}

/// Per path and comparator: log Mahalanobis distance, log RMSE, proper score
/// on the diagonal and wall time. Paths run in parallel; values do not depend
/// on the thread count.
inline std::vector<MetricRow> path_benchmark(const PathBenchConfig& cfg) {
  detail::require(cfg.paths >= 1, ErrorKind::usage, "need at least one path");
  const PathBenchData d = path_bench_data(cfg);
  const Hyperparams hyper = path_hyperparams(d.X, d.Y, cfg.seed);
  std::vector<std::vector<MetricRow>> slots(static_cast<std::size_t>(cfg.paths));
  parallel_for(slots.size(), cfg.threads, [&](std::size_t i) {
    const int rep = static_cast<int>(i);
    for (PathComparator c : cfg.comparators) {
      const PathPrediction pp = predict_path(d.X, d.Y, d.paths[i], c, cfg.predict, hyper);
      const std::string name = to_string(c);
      const Eigen::VectorXd& t = d.truth[i];
      slots[i].push_back({name, rep, "log_mahalanobis", std::log(mahalanobis(t, pp.mean, pp.cov))});
      slots[i].push_back({name, rep, "log_rmse", std::log(rmse(pp.mean, t))});
      slots[i].push_back({name, rep, "score", proper_score(t, pp.mean, pp.cov.diagonal())});
      slots[i].push_back({name, rep, "seconds", pp.seconds});
    }
  });
  std::vector<MetricRow> rows;
  for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  return rows;
}

}  // namespace lagp
