#pragma once

// Comparator grid over local design x correlation x global prescaling, the
// multi-resolution fit, cross-validation and the species ensemble.

#include <array>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagp/blhs.hpp"
#include "lagp/error.hpp"
#include "lagp/local_design.hpp"
#include "lagp/metrics.hpp"
#include "lagp/random.hpp"

namespace lagp {

enum class LocalMethod { nn, alc, alc2 };
enum class PrescaleMode { none, random, blhs };

struct MethodSpec {
  LocalMethod design = LocalMethod::alc;
  KernelMode kernel = KernelMode::isotropic;
  PrescaleMode prescale = PrescaleMode::none;

  bool operator==(const MethodSpec&) const = default;
};

/// Canonical names: {nn, nnsep, alc, alcsep, alc2, alcsep2} with an optional
/// ".s" (random subset) or ".sb" (BLHS) suffix.
inline std::string format_method(const MethodSpec& m) {
  std::string s = m.design == LocalMethod::nn ? "nn" : "alc";
  if (m.kernel == KernelMode::separable) s += "sep";
  if (m.design == LocalMethod::alc2) s += "2";
  if (m.prescale == PrescaleMode::random) s += ".s";
  if (m.prescale == PrescaleMode::blhs) s += ".sb";
  return s;
}

inline MethodSpec parse_method(const std::string& name) {
  MethodSpec m;
  std::string base = name;
  const auto dot = name.find('.');
  if (dot != std::string::npos) {
    base = name.substr(0, dot);
    const std::string suffix = name.substr(dot + 1);
    if (suffix == "s") {
      m.prescale = PrescaleMode::random;
    } else if (suffix == "sb") {
      m.prescale = PrescaleMode::blhs;
    } else {
      throw UsageError("unknown prescale suffix in method '" + name + "'");
    }
  }
  std::string rest;
  if (base.starts_with("nn")) {
    m.design = LocalMethod::nn;
    rest = base.substr(2);
  } else if (base.starts_with("alc")) {
    m.design = LocalMethod::alc;
    rest = base.substr(3);
  } else {
    throw UsageError("unknown method '" + name + "'");
  }
  if (rest.starts_with("sep")) {
    m.kernel = KernelMode::separable;
    rest = rest.substr(3);
  }
  if (rest == "2" && m.design == LocalMethod::alc) {
    m.design = LocalMethod::alc2;
  } else if (!rest.empty()) {
    throw UsageError("unknown method '" + name + "'");
  }
  return m;
}

/// All 18 comparators in grid order.
inline std::vector<MethodSpec> method_grid() {
  std::vector<MethodSpec> out;
  for (PrescaleMode p : {PrescaleMode::none, PrescaleMode::random, PrescaleMode::blhs}) {
    for (LocalMethod d : {LocalMethod::nn, LocalMethod::alc, LocalMethod::alc2}) {
      for (KernelMode k : {KernelMode::isotropic, KernelMode::separable}) {
        out.push_back({d, k, p});
      }
    }
  }
  return out;
}

struct FitOptions {
  Eigen::Index n0 = 6;
  Eigen::Index n = 50;
  Eigen::Index candidate_limit = 1000;
  double nugget = kDefaultNugget;
  /// Blocks per dimension for subsampling; 0 = automatic.
  int m = 0;
  int bootstrap_count = 30;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  /// Supplied global lengthscales skip the subsampling stage.
  std::optional<Eigen::VectorXd> global_scale;
};

struct FitResult {
  SurfacePrediction pred;
  /// Global lengthscales used for prescaling (empty for no prescale).
  Eigen::VectorXd global_scale;
  double seconds_global = 0.0;
  double seconds_local = 0.0;
  std::optional<double> rmse;
  std::optional<double> rmspe;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline SearchConfig search_config(const MethodSpec& m, const FitOptions& opt) {
  SearchConfig cfg;
  cfg.n0 = opt.n0;
  cfg.n = opt.n;
  cfg.candidate_limit = opt.candidate_limit;
  cfg.method = m.design == LocalMethod::nn ? DesignMethod::nn : DesignMethod::alc;
  cfg.local_mle = true;
  cfg.second_stage = m.design == LocalMethod::alc2;
  cfg.kernel_mode = m.kernel;
  cfg.iso_init_from_subset = m.kernel == KernelMode::isotropic;
  return cfg;
}

/// Global lengthscales by the method's prescale mode (random: one matched-size
/// subsample; blhs: bootstrap median).
inline Eigen::VectorXd global_lengthscales(const MethodSpec& m, const Eigen::MatrixXd& X,
                                           const Eigen::VectorXd& Y, const FitOptions& opt) {
  SubsampleSpec spec;
  spec.m = opt.m;
  spec.seed = opt.seed;
  if (m.prescale == PrescaleMode::random) {
    spec.mode = SubsampleMode::random;
    spec.bootstrap_count = 1;
  } else {
    spec.mode = SubsampleMode::blhs;
    spec.bootstrap_count = opt.bootstrap_count;
  }
  return bootstrap_lengthscales(X, Y, spec, opt.nugget, opt.threads).lengthscales;
}

/// Global stage (optional), prescaling of train and test, local prediction,
/// and metrics when the test responses are given.
inline FitResult fit_predict(const MethodSpec& method, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& Y, const Eigen::MatrixXd& Xtest,
                             const std::optional<Eigen::VectorXd>& Ytest, const FitOptions& opt) {
  detail::check_dim(Xtest.cols(), X.cols(), "fit_predict test inputs");
  detail::check_dim(Y.size(), X.rows(), "fit_predict responses");
  if (Ytest) detail::check_dim(Ytest->size(), Xtest.rows(), "fit_predict test responses");
  FitResult out;
  const SearchConfig cfg = search_config(method, opt);

  auto t0 = std::chrono::steady_clock::now();
  Hyperparams hyper;
  if (method.prescale == PrescaleMode::none) {
    hyper = Hyperparams::isotropic(X.cols(), default_lengthscale(X), opt.nugget);
    out.seconds_global = detail::seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    out.pred = predict_surface(X, Y, Xtest, cfg, hyper, opt.threads);
  } else {
    out.global_scale = opt.global_scale ? *opt.global_scale : global_lengthscales(method, X, Y, opt);
    hyper = Hyperparams::isotropic(X.cols(), 1.0, opt.nugget);
    const Eigen::MatrixXd Xs = prescale(X, out.global_scale);
    const Eigen::MatrixXd Xts = prescale(Xtest, out.global_scale);
    out.seconds_global = detail::seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    out.pred = predict_surface(Xs, Y, Xts, cfg, hyper, opt.threads);
  }
  out.seconds_local = detail::seconds_since(t0);

  if (Ytest && out.pred.failure_count() == 0) {
    out.rmse = rmse(out.pred.mean, *Ytest);
    if ((Ytest->array().abs() >= 1e-12).all()) out.rmspe = rmspe(out.pred.mean, *Ytest);
  }
  return out;
}

/// Per-row drag from six aligned per-species predictions.
inline Eigen::VectorXd ensemble_species(const std::vector<Eigen::VectorXd>& per_species,
                                        const std::vector<SpeciesMixture>& mixtures) {
  detail::require(per_species.size() == kSpecies, ErrorKind::usage,
                  "ensemble needs exactly six species predictors, got " +
                      std::to_string(per_species.size()));
  const auto rows = static_cast<Eigen::Index>(mixtures.size());
  for (const auto& p : per_species) detail::check_dim(p.size(), rows, "ensemble predictions");
  Eigen::VectorXd out(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    std::array<double, kSpecies> c{};
    for (std::size_t k = 0; k < kSpecies; ++k) c[k] = per_species[k][i];
    out[i] = mixture_drag(c, mixtures[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Fold label per row: a seeded permutation dealt round-robin into K folds.
inline std::vector<int> fold_assignment(Eigen::Index N, int folds, std::uint64_t seed) {
  detail::require(folds >= 2, ErrorKind::usage, "need at least 2 folds");
  detail::require(folds <= N, ErrorKind::usage, "more folds than rows");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng = make_rng(seed, streams::folds);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> label(static_cast<std::size_t>(N));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    label[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return label;
}

struct FoldMetrics {
  int fold = 0;
  Eigen::Index n_test = 0;
  double rmse = 0.0;
  /// NaN when a truth entry is (near) zero.
  double rmspe = 0.0;
  std::size_t failures = 0;
};

struct CvSummary {
  std::vector<FoldMetrics> folds;
  /// 0.1, 0.5 and 0.9 quantiles of the per-fold RMSE.
  std::array<double, 3> rmse_quantiles{};
};

/// K-fold cross-validation of one comparator. Each fold's global stage uses a
/// seed derived from (seed, fold).
inline CvSummary cv_experiment(const MethodSpec& method, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& Y, int folds, const FitOptions& opt) {
  detail::check_dim(Y.size(), X.rows(), "cv_experiment responses");
  const std::vector<int> label = fold_assignment(X.rows(), folds, opt.seed);
  CvSummary out;
  std::vector<double> r;
  for (int f = 0; f < folds; ++f) {
    IndexList tr, te;
    for (std::size_t i = 0; i < label.size(); ++i) {
      (label[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
    }
    FitOptions fo = opt;
    fo.seed = derive_seed(opt.seed, streams::folds, static_cast<std::uint64_t>(f) + 1);
    fo.n = std::min<Eigen::Index>(opt.n, static_cast<Eigen::Index>(tr.size()));
    fo.n0 = std::min(opt.n0, fo.n);
    fo.candidate_limit = std::max(fo.n, std::min<Eigen::Index>(opt.candidate_limit,
                                                              static_cast<Eigen::Index>(tr.size())));
    const Eigen::VectorXd yte = take_entries(Y, te);
    const FitResult fr = fit_predict(method, take_rows(X, tr), take_entries(Y, tr),
                                     take_rows(X, te), yte, fo);
    FoldMetrics fm;
    fm.fold = f;
    fm.n_test = static_cast<Eigen::Index>(te.size());
    fm.failures = fr.pred.failure_count();
    fm.rmse = fr.rmse.value_or(std::numeric_limits<double>::quiet_NaN());
    fm.rmspe = fr.rmspe.value_or(std::numeric_limits<double>::quiet_NaN());
    out.folds.push_back(fm);
    r.push_back(fm.rmse);
  }
  out.rmse_quantiles = {quantile(r, 0.1), quantile(r, 0.5), quantile(r, 0.9)};
  return out;
}

}  // namespace lagp
