// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments pick
// a subset by number, e.g. `acceptance 1 5 12`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lagp/lagp.hpp"
#include "test_util.hpp"

using namespace lagp;
using lagp::testing::rel_err;
using lagp::testing::uniform_matrix;
using lagp::testing::uniform_vector;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Independent dense computations: explicit inverse, no cached factors.
Eigen::MatrixXd dense_corr(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Hyperparams& h,
                           bool nugget) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < A.cols(); ++k) s += std::pow(A(i, k) - B(j, k), 2) / h.lengthscales[k];
      K(i, j) = std::exp(-s) + (nugget && i == j ? h.nugget : 0.0);
    }
  return K;
}

double dense_variance(const Eigen::MatrixXd& X, const Eigen::RowVectorXd& x, const Hyperparams& h) {
  const Eigen::MatrixXd Kinv = dense_corr(X, X, h, true).inverse();
  const Eigen::VectorXd k = dense_corr(X, x, h, false).col(0);
  return 1.0 + h.nugget - k.dot(Kinv * k);
}

double refit_reduction(const Eigen::MatrixXd& Xj, const Eigen::RowVectorXd& w,
                       const Eigen::RowVectorXd& c, const Hyperparams& h) {
  Eigen::MatrixXd X1(Xj.rows() + 1, Xj.cols());
  X1 << Xj, c;
  return dense_variance(Xj, w, h) - dense_variance(X1, w, h);
}

// ---------------------------------------------------------------------------

Outcome gradient_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> jd(10, 30), wd(5, 50);
  const int configs = 120;
  double worst = 0.0;
  for (int rep = 0; rep < configs; ++rep) {
    const Eigen::Index p = rep % 2 ? 4 : 2;
    const Eigen::Index j = jd(rng);
    const Hyperparams h(uniform_vector(rng, p, 0.2, 1.0), 1e-6);
    const GPModel m = build_gp(uniform_matrix(rng, j, p), uniform_vector(rng, j), h);
    const Eigen::MatrixXd W = uniform_matrix(rng, wd(rng), p);
    const Eigen::VectorXd c = uniform_vector(rng, p);
    const auto g = joint_alc_gradient(m, W, c);
    if (!g) return {false, fmt("gradient undefined at config %d", rep)};
    for (Eigen::Index l = 0; l < p; ++l) {
      const double step = 1e-6;
      Eigen::VectorXd a = c, b = c;
      a[l] += step;
      b[l] -= step;
      const double fd = (*joint_alc_reduction(m, W, a) - *joint_alc_reduction(m, W, b)) / (2 * step);
      // Relative to max(|fd|, 1e-3): components below 1e-3 must agree to 1e-8.
      worst = std::max(worst, std::abs((*g)[l] - fd) / std::max(std::abs(fd), 1e-3));
    }
  }
  return {worst <= 1e-5, fmt("%d configs, worst relative error %.2e (limit 1e-5)", configs, worst)};
}

Outcome alc_refit_oracle() {
  std::mt19937_64 rng(102);
  double worst_point = 0.0, worst_joint = 0.0;
  const int instances = 60;
  for (int rep = 0; rep < instances; ++rep) {
    const Eigen::Index p = 1 + rep % 4, j = 5 + rep % 26;
    const Hyperparams h(uniform_vector(rng, p, 0.1, 1.0), 1e-6);
    const Eigen::MatrixXd Xj = uniform_matrix(rng, j, p);
    const GPModel m = build_gp(Xj, uniform_vector(rng, j), h);
    const Eigen::RowVectorXd c = uniform_matrix(rng, 1, p);
    const Eigen::MatrixXd W = uniform_matrix(rng, 1 + rep % 20, p);
    const auto r = alc_reduction(m, W.row(0), c.transpose());
    const auto jr = joint_alc_reduction(m, W, c.transpose());
    if (!r || !jr) return {false, fmt("reduction undefined at instance %d", rep)};
    worst_point = std::max(worst_point, std::abs(*r - refit_reduction(Xj, W.row(0), c, h)));
    double s = 0.0;
    for (Eigen::Index w = 0; w < W.rows(); ++w) s += refit_reduction(Xj, W.row(w), c, h);
    worst_joint = std::max(worst_joint, std::abs(*jr - s / static_cast<double>(W.rows())));
  }
  return {worst_point <= 1e-8 && worst_joint <= 1e-8,
          fmt("%d instances, pointwise max err %.2e, joint max err %.2e (limit 1e-8)", instances,
              worst_point, worst_joint)};
}

Outcome incremental_oracle() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (const Eigen::Index n : {5, 20, 60}) {
    const Eigen::MatrixXd X = uniform_matrix(rng, n + 1, 3);
    const Eigen::VectorXd y = uniform_vector(rng, n + 1, -1, 1);
    const Hyperparams h(Eigen::Vector3d(0.05, 0.08, 0.1), 1e-6);
    const GPModel ext = extend_gp(build_gp(X.topRows(n), y.head(n), h), X.row(n), y[n]);
    const GPModel full = build_gp(X, y, h);
    const Eigen::MatrixXd T = uniform_matrix(rng, 25, 3);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      const Prediction a = predict_point(ext, T.row(i)), b = predict_point(full, T.row(i));
      worst = std::max({worst, std::abs(a.mean - b.mean), std::abs(a.scale2 - b.scale2)});
    }
  }
  return {worst <= 1e-8, fmt("N in {5,20,60}, max prediction difference %.2e (limit 1e-8)", worst)};
}

Outcome gp_correctness() {
  std::mt19937_64 rng(104);
  // Interpolation without nugget.
  const Eigen::MatrixXd X = uniform_matrix(rng, 25, 2);
  const Eigen::VectorXd y = uniform_vector(rng, 25, -2, 2);
  const GPModel m0 = build_gp(X, y, Hyperparams(Eigen::Vector2d(0.05, 0.08), 0.0));
  double interp = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) interp = std::max(interp, std::abs(predict_point(m0, X.row(i)).mean - y[i]));

  // Dense-inverse oracle up to N = 64.
  double dense = 0.0;
  for (Eigen::Index n = 8; n <= 64; n += 8) {
    const Eigen::Index p = 1 + n % 3;
    const Eigen::MatrixXd Xn = uniform_matrix(rng, n, p);
    const Eigen::VectorXd yn = uniform_vector(rng, n, -1, 1);
    const Hyperparams h(uniform_vector(rng, p, 0.05, 0.3), 1e-4);
    const GPModel m = build_gp(Xn, yn, h);
    const Eigen::MatrixXd K = dense_corr(Xn, Xn, h, true), Kinv = K.inverse();
    const double psi = yn.dot(Kinv * yn), N = static_cast<double>(n);
    const double ll = std::lgamma(N / 2) - N / 2 * std::log(2 * std::numbers::pi) -
                      0.5 * std::log(K.determinant()) - N / 2 * std::log(psi / 2);
    const Eigen::RowVectorXd x = uniform_matrix(rng, 1, p);
    const Eigen::VectorXd k = dense_corr(Xn, x, h, false).col(0);
    const Prediction pr = predict_point(m, x);
    dense = std::max({dense, rel_err(m.psi(), psi), rel_err(log_marginal_likelihood(m), ll),
                      rel_err(pr.mean, k.dot(Kinv * yn)),
                      std::abs(pr.scale2 - psi * (1 - k.dot(Kinv * k)) / N) / (psi / N)});
  }

  // Closed forms: N = 1 gives log 1 = 0 for y = 1; identity correlation with
  // y = (1,1) gives -log(2 pi).
  Eigen::MatrixXd X1(1, 1);
  X1 << 0.0;
  const double l1 = log_marginal_likelihood(build_gp(X1, Eigen::VectorXd::Ones(1), Hyperparams::isotropic(1, 1.0, 0.0)));
  Eigen::MatrixXd X2(2, 1);
  X2 << 0.0, 100.0;
  const double l2 = log_marginal_likelihood(build_gp(X2, Eigen::VectorXd::Ones(2), Hyperparams::isotropic(1, 1.0, 0.0)));
  const double closed = std::max(std::abs(l1), std::abs(l2 + std::log(2 * std::numbers::pi)));
  return {interp <= 1e-8 && dense <= 1e-8 && closed <= 1e-12,
          fmt("interpolation %.2e, dense oracle rel %.2e (N<=64), closed forms %.2e", interp, dense,
              closed)};
}

Outcome blhs_structure() {
  const Eigen::MatrixXd X = lhs_design(216, 2, 105);
  int latin = 0;
  double total_small = 0.0;
  for (int s = 0; s < 500; ++s) {
    const BlhsDraw d = blhs_subsample(X, 6, derive_seed(105, streams::subsample, s));
    bool ok = true;
    for (Eigen::Index k = 0; k < d.levels.cols(); ++k) {
      std::set<int> seen(d.levels.col(k).data(), d.levels.col(k).data() + 6);
      ok = ok && seen.size() == 6 && *seen.begin() == 0 && *seen.rbegin() == 5;
    }
    latin += ok;
    total_small += static_cast<double>(d.rows.size());
  }
  const Eigen::MatrixXd Xb = lhs_design(100000, 8, 106);
  double total_big = 0.0;
  const int draws = 200;
  for (int s = 0; s < draws; ++s) total_big += static_cast<double>(blhs_subsample(Xb, 2, s).rows.size());
  const double small = total_small / 500.0, big = total_big / draws;
  const bool pass = latin == 500 && std::abs(small - 36.0) <= 0.05 * 36.0 &&
                    std::abs(big - 781.25) <= 0.05 * 781.25;
  return {pass, fmt("Latin %d/500; mean size %.2f vs 36 (N=216,d=2,m=6); %.2f vs 781.25 "
                    "(N=1e5,d=8,m=2)", latin, small, big)};
}

Outcome prescale_identity() {
  std::mt19937_64 rng(106);
  double worst_ll = 0.0, worst_pred = 0.0;
  // Mean errors are relative to |mean|; scale2 errors relative to the prior
  // scale psi/N, since scale2 can itself be a tiny difference.
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index p = 2 + rep % 3, n = 40;
    const Eigen::VectorXd theta = uniform_vector(rng, p, 0.1, 3.0);
    const Eigen::MatrixXd X = uniform_matrix(rng, n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = std::sin(3 * X(i, 0)) + X.row(i).squaredNorm();
    const Eigen::MatrixXd T = uniform_matrix(rng, 10, p);
    const GPModel raw = build_gp(X, y, Hyperparams(theta, 1e-6));
    const GPModel sc = build_gp(prescale(X, theta), y, Hyperparams::isotropic(p, 1.0, 1e-6));
    worst_ll = std::max(worst_ll, rel_err(log_marginal_likelihood(raw), log_marginal_likelihood(sc)));
    const Eigen::MatrixXd Ts = prescale(T, theta);
    const double prior = raw.psi() / static_cast<double>(n);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      const Prediction a = predict_point(raw, T.row(i)), b = predict_point(sc, Ts.row(i));
      worst_pred = std::max({worst_pred, rel_err(a.mean, b.mean), std::abs(a.scale2 - b.scale2) / prior});
    }
  }
  // Local designs too: nn and alc on prescaled inputs vs weighted raw search.
  const Eigen::MatrixXd X = lhs_design(800, 3, 107);
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = std::sin(4 * X(i, 0)) + X(i, 1) * X(i, 2);
  const Eigen::MatrixXd T = lhs_design(30, 3, 108);
  const Eigen::Vector3d theta(0.2, 1.5, 4.0);
  double worst_local = 0.0;
  bool same_rows = true;
  const Eigen::MatrixXd Xs = prescale(X, theta), Ts = prescale(T, theta);
  for (DesignMethod dm : {DesignMethod::nn, DesignMethod::alc}) {
    SearchConfig cs;
    cs.n = 30;
    cs.candidate_limit = 200;
    cs.method = dm;
    SearchConfig cr = cs;
    cr.metric_weights = theta.cwiseInverse();
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      const LocalDesign a = fit_local(Xs, y, Ts.row(i), cs, Hyperparams::isotropic(3, 1.0, 1e-6));
      const LocalDesign b = fit_local(X, y, T.row(i), cr, Hyperparams(theta, 1e-6));
      same_rows = same_rows && a.indices == b.indices;
      const Prediction pa = predict_point(a.model, Ts.row(i)), pb = predict_point(b.model, T.row(i));
      const double prior = b.model.psi() / static_cast<double>(b.model.size());
      worst_local = std::max({worst_local, rel_err(pa.mean, pb.mean), std::abs(pa.scale2 - pb.scale2) / prior});
    }
  }
  const bool pass = worst_ll <= 1e-10 && worst_pred <= 1e-10 && worst_local <= 1e-10 && same_rows;
  return {pass, fmt("likelihood rel %.2e, full-GP predictions rel %.2e, local designs %s, "
                    "predictions rel %.2e (limit 1e-10)", worst_ll, worst_pred,
                    same_rows ? "identical" : "DIFFER", worst_local)};
}

Outcome borehole_ordering() {
  GridBenchConfig cfg;
  cfg.reps = 5;
  cfg.seed = 2024;
  for (const char* s : {"nn", "alc", "alc.s", "alc.sb", "alcsep", "alcsep.s", "alcsep.sb", "alc2",
                        "alc2.s", "alc2.sb", "alcsep2", "alcsep2.s", "alcsep2.sb"}) {
    cfg.methods.push_back(parse_method(s));
  }
  const auto rows = borehole_grid(cfg);
  const double nn = median_metric(rows, "nn", "rmse");
  bool pass = median_metric(rows, "alc.sb", "rmse") < nn;
  std::string detail = fmt("median RMSE nn %.4f", nn);
  for (const char* base : {"alc", "alcsep", "alc2", "alcsep2"}) {
    const std::string b = base;
    const double none = median_metric(rows, b, "rmse");
    const double s = median_metric(rows, b + ".s", "rmse");
    const double sb = median_metric(rows, b + ".sb", "rmse");
    pass = pass && s < none && sb < none;
    detail += fmt("; %s %.4f / .s %.4f / .sb %.4f", base, none, s, sb);
  }
  for (const auto& r : rows) pass = pass && !(r.metric == "failures" && r.value > 0);
  return {pass, detail + " (5 reps, N=1e4/1e3)"};
}

Outcome blhs_vs_random() {
  const Eigen::MatrixXd X = lhs_design(10000, 8, 109);
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = borehole(X.row(i));
  SubsampleSpec spec;
  spec.bootstrap_count = 30;
  spec.seed = 110;
  const GlobalScale b = bootstrap_lengthscales(X, y, spec);
  spec.mode = SubsampleMode::random;
  const GlobalScale r = bootstrap_lengthscales(X, y, spec);
  int le = 0, strict = 0;
  std::ostringstream vals;
  for (Eigen::Index k = 0; k < 8; ++k) {
    le += b.lengthscales[k] <= r.lengthscales[k];
    strict += b.lengthscales[k] < r.lengthscales[k];
    vals << (k ? " " : "") << fmt("%.3g/%.3g", b.lengthscales[k], r.lengthscales[k]);
  }
  return {le >= 6, fmt("BLHS <= random in %d/8 coordinates (%d strict), m=%d, B=30; medians "
                       "blhs/random: ", le, strict, b.m) + vals.str()};
}

Outcome path_pattern() {
  PathBenchConfig cfg;
  cfg.paths = 20;
  cfg.n_train = 10000;
  cfg.predict.n = 60;
  cfg.seed = 111;
  const auto rows = path_benchmark(cfg);
  const double ex = median_metric(rows, "alc-ex", "log_mahalanobis");
  const double opt = median_metric(rows, "alc-opt", "log_mahalanobis");
  const double pw = median_metric(rows, "alc-pw", "log_mahalanobis");
  const double nnpw = median_metric(rows, "nn-pw", "log_mahalanobis");
  double t_ex = 0.0, t_opt = 0.0;
  for (const auto& r : rows) {
    if (r.metric != "seconds") continue;
    if (r.comparator == "alc-ex") t_ex += r.value;
    if (r.comparator == "alc-opt") t_opt += r.value;
  }
  const bool pass = ex < pw && ex < nnpw && opt < pw && opt < nnpw && t_opt < t_ex;
  return {pass, fmt("median log-Mahalanobis alc-ex %.3f, alc-opt %.3f, alc-pw %.3f, nn-pw %.3f; "
                    "time alc-opt %.2fs vs alc-ex %.2fs", ex, opt, pw, nnpw, t_opt, t_ex)};
}

Outcome michalewicz_spots() {
  const double f0 = michalewicz(Eigen::VectorXd::Zero(4), 10.0);
  const double f1 = michalewicz(Eigen::VectorXd::Constant(1, std::numbers::pi / 2), 10.0);
  const double want = -std::pow(2.0, -10.0);
  return {f0 == 0.0 && std::abs(f1 - want) <= 1e-16,
          fmt("f(0)=%g, f(pi/2)=%.17g vs %.17g", f0, f1, want)};
}

Outcome mixture_combiner() {
  const std::array<double, kSpecies> c = {2.05, 2.15, 2.25, 2.35, 2.45, 2.55};
  bool unit = true;
  for (std::size_t k = 0; k < kSpecies; ++k) {
    SpeciesMixture m;
    m.mole_fraction[k] = 1.0;
    unit = unit && mixture_drag(c, m) == c[k];
  }
  SpeciesMixture m;
  m.mole_fraction = {0.835756795, 0.000040988, 0.014095898, 0.005918278, 0.137959854, 0.006228188};
  // Weighted mean computed by hand at 40 digits.
  const double got = mixture_drag(c, m), want = 2.0719231527278096;
  return {unit && std::abs(got - want) <= 1e-12,
          fmt("unit vectors exact: %s; mixture %.16f vs %.16f", unit ? "yes" : "no", got, want)};
}

std::vector<MetricRow> without_timing(std::vector<MetricRow> rows) {
  std::erase_if(rows, [](const MetricRow& r) { return r.metric == "seconds"; });
  return rows;
}

bool bitwise_equal(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].comparator != b[i].comparator || a[i].rep != b[i].rep || a[i].metric != b[i].metric)
      return false;
    // NaN compares unequal; match bit patterns.
    if (std::memcmp(&a[i].value, &b[i].value, sizeof(double)) != 0) return false;
  }
  return true;
}

Outcome determinism() {
  std::vector<std::string> bad;
  int checked = 0;
  auto compare = [&](const std::string& name, auto&& run) {
    ++checked;
    if (!bitwise_equal(without_timing(run(1u)), without_timing(run(8u)))) bad.push_back(name);
  };
  GridBenchConfig g;
  g.n_train = 1000;
  g.n_test = 100;
  g.reps = 1;
  g.seed = 112;
  g.fit.n = 30;
  g.fit.bootstrap_count = 8;
  compare("borehole-grid", [&](unsigned t) { auto c = g; c.fit.threads = t; return borehole_grid(c); });
  compare("michalewicz-grid", [&](unsigned t) { auto c = g; c.fit.threads = t; return michalewicz_grid(c); });
  for (int dims : {2, 4}) {
    PathBenchConfig pc;
    pc.dims = dims;
    pc.n_train = 2000;
    pc.paths = 6;
    pc.resolution = 40;
    pc.predict.n = 30;
    pc.seed = 113;
    compare(dims == 2 ? "paths-2d" : "paths-4d",
            [&](unsigned t) { auto c = pc; c.threads = t; return path_benchmark(c); });
  }
  const Eigen::MatrixXd X = lhs_design(600, 8, 114);
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = borehole(X.row(i));
  compare("cv alcsep2.sb", [&](unsigned t) {
    FitOptions fo;
    fo.n = 25;
    fo.bootstrap_count = 6;
    fo.threads = t;
    fo.seed = 115;
    std::vector<MetricRow> rows;
    for (const auto& f : cv_experiment(parse_method("alcsep2.sb"), X, y, 5, fo).folds) {
      rows.push_back({"cv", f.fold, "rmse", f.rmse});
      rows.push_back({"cv", f.fold, "rmspe", f.rmspe});
    }
    return rows;
  });
  compare("global-scale", [&](unsigned t) {
    SubsampleSpec s;
    s.bootstrap_count = 12;
    s.m = 2;
    s.seed = 116;
    const GlobalScale gsc = bootstrap_lengthscales(X, y, s, kDefaultNugget, t);
    std::vector<MetricRow> rows;
    for (Eigen::Index i = 0; i < gsc.provenance.size(); ++i)
      rows.push_back({"boot", static_cast<int>(i), "theta", gsc.provenance.data()[i]});
    return rows;
  });
  std::string detail = fmt("%d experiments compared at 1 vs 8 workers", checked);
  for (const auto& b : bad) detail += "; differs: " + b;
  return {bad.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"joint ALC gradient vs central differences", gradient_oracle},
      {"ALC reductions vs explicit refit", alc_refit_oracle},
      {"incremental update vs rebuild", incremental_oracle},
      {"GP interpolation, dense oracle, closed forms", gp_correctness},
      {"BLHS Latin structure and subsample sizes", blhs_structure},
      {"prescale identity", prescale_identity},
      {"borehole comparator ordering", borehole_ordering},
      {"BLHS vs random-subset lengthscales", blhs_vs_random},
      {"path design Mahalanobis and timing ordering", path_pattern},
      {"Michalewicz spot values", michalewicz_spots},
      {"species mixture combiner", mixture_combiner},
      {"determinism across worker counts", determinism},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.contains(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": "
              << o.detail << fmt(" (%.1fs)", secs) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
