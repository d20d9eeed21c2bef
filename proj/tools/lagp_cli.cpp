// lagp: data generation, local GP prediction, path prediction and the
// desk-scale benchmarks. Exit codes: 0 ok, 2 usage, 3 data, 4 numerical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagp/lagp.hpp"

namespace fs = std::filesystem;
using namespace lagp;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// "-" means stdout.
void emit(const std::string& path, const Table& t) {
  if (path == "-") {
    print_csv(std::cout, t);
  } else {
    write_csv(path, t);
  }
}

Table table(std::vector<std::string> names, Eigen::MatrixXd data) {
  Table t;
  t.names = std::move(names);
  t.data = std::move(data);
  return t;
}

std::vector<double> parse_list(const std::string& s, std::size_t want, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(detail::parse_real(detail::trim(cell), what));
  if (out.size() != want) {
    throw UsageError(std::string(what) + " needs " + std::to_string(want) + " comma-separated values");
  }
  return out;
}

/// Aggregate lengthscales from a global-scale file: the boot == 0 row if
/// there is a boot column, else the first row; columns theta1..thetap.
Eigen::VectorXd read_scale(const std::string& path, Eigen::Index p) {
  const Table t = read_csv(path);
  Eigen::Index row = 0;
  if (t.has("boot")) {
    const Eigen::Index c = t.column("boot");
    while (row < t.data.rows() && t.data(row, c) != 0.0) ++row;
  }
  detail::require(row < t.data.rows(), ErrorKind::data, path + ": no aggregate lengthscale row");
  Eigen::VectorXd theta(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const std::string name = "theta" + std::to_string(k + 1);
    detail::require(t.has(name), ErrorKind::data, path + ": missing column " + name);
    theta[k] = t.data(row, t.column(name));
  }
  detail::require((theta.array() > 0.0).all(), ErrorKind::data,
                  path + ": lengthscales must be positive");
  return theta;
}

Dataset load(const std::string& path, bool require_y) { return to_dataset(read_csv(path), require_y); }

// ---------------------------------------------------------------------------

struct GenDesignArgs {
  std::string fn = "borehole";
  Eigen::Index n = 1000;
  Eigen::Index p = 0;
  double M = 10.0;
  std::uint64_t seed = 0;
  std::string out = "-";
};

void gen_design(const GenDesignArgs& a) {
  Eigen::Index p = a.p;
  if (a.fn == "borehole") {
    if (p == 0) p = 8;
    detail::require(p == 8, ErrorKind::usage, "borehole has 8 inputs");
  } else if (a.fn == "michalewicz") {
    if (p == 0) p = 4;
  } else {
    if (p == 0) p = 2;
    detail::require(p == 2, ErrorKind::usage, "fn2d has 2 inputs");
  }
  Eigen::MatrixXd X = lhs_design(a.n, p, a.seed);
  if (a.fn == "michalewicz") X *= std::numbers::pi;
  if (a.fn == "fn2d") X = (4.0 * X.array() - 2.0).matrix();
  Eigen::VectorXd y(a.n);
  for (Eigen::Index i = 0; i < a.n; ++i) {
    y[i] = a.fn == "borehole"      ? borehole(X.row(i))
           : a.fn == "michalewicz" ? michalewicz(X.row(i), a.M)
                                   : test_function_2d(X.row(i));
  }
  emit(a.out, from_dataset(X, &y));
}

struct GenPathsArgs {
  int count = 20;
  int resolution = 100;
  std::string rect = "-2,2,-2,2";
  std::uint64_t seed = 0;
  bool with_y = false;
  std::string out = "-";
};

void gen_paths(const GenPathsArgs& a) {
  PathSpec spec;
  spec.resolution = a.resolution;
  spec.seed = a.seed;
  const auto r = parse_list(a.rect, 4, "--rect");
  spec.rect = {r[0], r[1], r[2], r[3]};
  const auto paths = gen_paths_2d(spec, a.count);
  const Eigen::Index rows = static_cast<Eigen::Index>(paths.size()) * a.resolution;
  Eigen::MatrixXd data(rows, a.with_y ? 4 : 3);
  Eigen::Index i = 0;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    for (Eigen::Index j = 0; j < paths[k].points.rows(); ++j, ++i) {
      data(i, 0) = static_cast<double>(k);
      data(i, 1) = paths[k].points(j, 0);
      data(i, 2) = paths[k].points(j, 1);
      if (a.with_y) data(i, 3) = test_function_2d(paths[k].points.row(j));
    }
  }
  std::vector<std::string> names = {"path", "x1", "x2"};
  if (a.with_y) names.push_back("y");
  emit(a.out, table(names, data));
}

struct GlobalScaleArgs {
  std::string train;
  std::string mode = "blhs";
  int m = 0;
  int boot = 30;
  std::uint64_t seed = 0;
  double nugget = kDefaultNugget;
  unsigned threads = 1;
  std::string out = "-";
};

void global_scale(const GlobalScaleArgs& a) {
  const Dataset d = load(a.train, true);
  SubsampleSpec spec;
  spec.m = a.m;
  spec.bootstrap_count = a.boot;
  spec.mode = a.mode == "blhs" ? SubsampleMode::blhs : SubsampleMode::random;
  spec.seed = a.seed;
  const GlobalScale g = bootstrap_lengthscales(d.X, *d.y, spec, a.nugget, a.threads);
  const Eigen::Index p = d.X.cols();
  Eigen::MatrixXd data(a.boot + 1, 4 + p);
  std::vector<double> sizes(g.subsample_sizes.begin(), g.subsample_sizes.end());
  // Row 0 is the aggregate; its size is the median subsample size.
  data.row(0) << 0.0, 1.0, static_cast<double>(g.m), median_of(sizes), g.lengthscales.transpose();
  for (int b = 0; b < a.boot; ++b) {
    const bool ok = !std::isnan(g.provenance(b, 0));
    data(b + 1, 0) = b + 1;
    data(b + 1, 1) = ok ? 1.0 : 0.0;
    data(b + 1, 2) = static_cast<double>(g.m);
    data(b + 1, 3) = static_cast<double>(g.subsample_sizes[static_cast<std::size_t>(b)]);
    data.row(b + 1).tail(p) = ok ? Eigen::RowVectorXd(g.provenance.row(b))
                                 : Eigen::RowVectorXd::Zero(p);
  }
  std::vector<std::string> names = {"boot", "ok", "m", "size"};
  for (Eigen::Index k = 0; k < p; ++k) names.push_back("theta" + std::to_string(k + 1));
  emit(a.out, table(names, data));
}

struct PredictArgs {
  std::string method;
  std::string train, test;
  Eigen::Index n0 = 6, n = 50, nprime = 1000;
  int m = 0, boot = 30;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  double nugget = kDefaultNugget;
  std::string scale;
  std::string out = "-";
};

void predict(const PredictArgs& a) {
  const MethodSpec method = parse_method(a.method);
  const Dataset tr = load(a.train, true);
  const Dataset te = load(a.test, false);
  detail::require(te.X.cols() == tr.X.cols(), ErrorKind::data,
                  "train has " + std::to_string(tr.X.cols()) + " inputs, test has " +
                      std::to_string(te.X.cols()));
  FitOptions opt;
  opt.n0 = a.n0;
  opt.n = a.n;
  opt.candidate_limit = a.nprime;
  opt.m = a.m;
  opt.bootstrap_count = a.boot;
  opt.threads = a.threads;
  opt.seed = a.seed;
  opt.nugget = a.nugget;
  if (!a.scale.empty()) {
    detail::require(method.prescale != PrescaleMode::none, ErrorKind::usage,
                    "--scale needs a prescaled method (.s or .sb)");
    opt.global_scale = read_scale(a.scale, tr.X.cols());
  }
  const FitResult r = fit_predict(method, tr.X, *tr.y, te.X, te.y, opt);
  const Eigen::Index rows = te.X.rows();
  Eigen::MatrixXd data(rows, 4);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const bool failed = !r.pred.failures[static_cast<std::size_t>(i)].empty();
    data.row(i) << r.pred.mean[i], r.pred.scale2[i], r.pred.dof[i], failed ? 1.0 : 0.0;
  }
  emit(a.out, table({"mean", "scale2", "dof", "failed"}, data));
  if (const std::size_t f = r.pred.failure_count(); f > 0) {
    std::cerr << "warning: " << f << " of " << rows << " points failed\n";
  }
  if (te.y) {
    std::ostream& m = a.out == "-" ? std::cerr : std::cout;
    m << "metric,value\n";
    if (r.rmse) m << "rmse," << format_real(*r.rmse) << '\n';
    if (r.rmspe) m << "rmspe," << format_real(*r.rmspe) << '\n';
    m << "failures," << r.pred.failure_count() << '\n';
  }
}

struct PathPredictArgs {
  std::string method = "alc-opt";
  std::string train, paths;
  Eigen::Index n0 = 6, n = 60, nprime = 0;
  Eigen::Index draws = 0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string scale;
  std::string out_pred = "-", out_cov, out_draws;
};

void path_predict(const PathPredictArgs& a) {
  const PathComparator c = parse_path_comparator(a.method);
  const Dataset tr = load(a.train, true);
  const Table pt = read_csv(a.paths);
  detail::require(pt.has("path"), ErrorKind::data, a.paths + ": missing 'path' column");
  const Dataset pd = to_dataset(pt, false);
  detail::require(pd.X.cols() == tr.X.cols(), ErrorKind::data,
                  "paths and training inputs differ in dimension");

  // Consecutive rows with the same id form one reference set.
  const Eigen::VectorXd ids = pt.data.col(pt.column("path"));
  std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;  // start, length
  for (Eigen::Index i = 0; i < ids.size(); ++i) {
    if (i == 0 || ids[i] != ids[i - 1]) spans.emplace_back(i, 0);
    ++spans.back().second;
  }

  const Hyperparams hyper =
      a.scale.empty() ? path_hyperparams(tr.X, *tr.y, a.seed)
                      : Hyperparams(read_scale(a.scale, tr.X.cols()), kDefaultNugget);
  PathPredictOptions po;
  po.n0 = a.n0;
  po.n = a.n;
  po.candidate_limit = a.nprime;

  std::vector<PathPrediction> preds(spans.size());
  std::vector<Eigen::MatrixXd> draws(spans.size());
  parallel_for(spans.size(), a.threads, [&](std::size_t k) {
    const Eigen::MatrixXd W = pd.X.middleRows(spans[k].first, spans[k].second);
    preds[k] = predict_path(tr.X, *tr.y, W, c, po, hyper);
    if (a.draws > 0) {
      draws[k] = student_t_draws(preds[k].mean, preds[k].cov, preds[k].dof, a.draws,
                                 derive_seed(a.seed, streams::draws, k));
    }
  });

  Eigen::MatrixXd out(ids.size(), 5);
  Eigen::Index cov_rows = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto [s, len] = spans[k];
    for (Eigen::Index j = 0; j < len; ++j) {
      out.row(s + j) << ids[s], static_cast<double>(j), preds[k].mean[j], preds[k].cov(j, j),
          preds[k].dof;
    }
    cov_rows += len * len;
  }
  emit(a.out_pred, table({"path", "i", "mean", "scale2", "dof"}, out));

  if (!a.out_cov.empty()) {
    Eigen::MatrixXd cov(cov_rows, 4);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const Eigen::Index len = spans[k].second;
      for (Eigen::Index i = 0; i < len; ++i)
        for (Eigen::Index j = 0; j < len; ++j) cov.row(r++) << ids[spans[k].first], i, j, preds[k].cov(i, j);
    }
    emit(a.out_cov, table({"path", "i", "j", "cov"}, cov));
  }
  if (!a.out_draws.empty()) {
    Eigen::MatrixXd dr(ids.size() * a.draws, 4);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < spans.size(); ++k)
      for (Eigen::Index d = 0; d < a.draws; ++d)
        for (Eigen::Index i = 0; i < spans[k].second; ++i)
          dr.row(r++) << ids[spans[k].first], d, i, draws[k](d, i);
    emit(a.out_draws, table({"path", "draw", "i", "value"}, dr));
  }
  if (pd.y) {
    std::ostream& m = a.out_pred == "-" ? std::cerr : std::cout;
    m << "path,log_mahalanobis,log_rmse,seconds\n";
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const Eigen::VectorXd t = pd.y->segment(spans[k].first, spans[k].second);
      m << format_real(ids[spans[k].first]) << ','
        << format_real(std::log(mahalanobis(t, preds[k].mean, preds[k].cov))) << ','
        << format_real(std::log(rmse(preds[k].mean, t))) << ',' << format_real(preds[k].seconds)
        << '\n';
    }
  }
}

struct BenchArgs {
  std::string experiment;
  double scale = 1.0;
  int reps = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Eigen::Index n = 0;
  std::string methods;
  std::string outdir = ".";
};

void bench(const BenchArgs& a) {
  detail::require(a.scale > 0.0, ErrorKind::usage, "--scale must be positive");
  std::vector<std::string> names;
  if (!a.methods.empty()) {
    std::stringstream ss(a.methods);
    std::string s;
    while (std::getline(ss, s, ',')) names.push_back(detail::trim(s));
  }
  std::vector<MetricRow> rows;
  if (a.experiment == "borehole-grid" || a.experiment == "michalewicz-grid") {
    GridBenchConfig cfg;
    cfg.n_train = std::llround(1e4 * a.scale);
    cfg.n_test = std::max<Eigen::Index>(1, std::llround(1e3 * a.scale));
    cfg.reps = a.reps > 0 ? a.reps : 5;
    cfg.seed = a.seed;
    cfg.fit.threads = a.threads;
    if (a.n > 0) cfg.fit.n = a.n;
    for (const auto& s : names) cfg.methods.push_back(parse_method(s));
    rows = a.experiment == "borehole-grid" ? borehole_grid(cfg) : michalewicz_grid(cfg);
  } else {
    PathBenchConfig cfg;
    cfg.dims = a.experiment == "paths-2d" ? 2 : 4;
    cfg.n_train = std::llround(1e4 * a.scale);
    cfg.paths = a.reps > 0 ? a.reps : 20;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    if (a.n > 0) cfg.predict.n = a.n;
    if (!names.empty()) {
      cfg.comparators.clear();
      for (const auto& s : names) cfg.comparators.push_back(parse_path_comparator(s));
    }
    rows = path_benchmark(cfg);
  }
  fs::create_directories(a.outdir);
  std::ofstream res(fs::path(a.outdir) / "results.csv"), sum(fs::path(a.outdir) / "summary.csv");
  if (!res || !sum) throw DataError("cannot write into '" + a.outdir + "'");
  print_rows(res, rows);
  print_summary(sum, rows);
  print_summary(std::cout, rows);
}

struct EnsembleArgs {
  std::string models, mix, inputs;
  std::string method = "alcsep.sb";
  Eigen::Index n0 = 6, n = 50, nprime = 1000;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string out = "-";
};

void ensemble(const EnsembleArgs& a) {
  const MethodSpec method = parse_method(a.method);
  const Dataset in = load(a.inputs, false);
  const Table mt = read_csv(a.mix);
  detail::require(mt.data.rows() == in.X.rows(), ErrorKind::data,
                  "mixture file and inputs differ in row count");
  std::vector<SpeciesMixture> mixes(static_cast<std::size_t>(in.X.rows()));
  for (std::size_t k = 0; k < kSpecies; ++k) {
    detail::require(mt.has(kSpeciesNames[k]), ErrorKind::data,
                    a.mix + ": missing mole fraction column " + kSpeciesNames[k]);
    const Eigen::Index c = mt.column(kSpeciesNames[k]);
    for (Eigen::Index i = 0; i < in.X.rows(); ++i) {
      mixes[static_cast<std::size_t>(i)].mole_fraction[k] = mt.data(i, c);
    }
  }
  FitOptions opt;
  opt.n0 = a.n0;
  opt.n = a.n;
  opt.candidate_limit = a.nprime;
  opt.threads = a.threads;
  std::vector<Eigen::VectorXd> per;
  for (std::size_t k = 0; k < kSpecies; ++k) {
    const Dataset tr = load((fs::path(a.models) / (std::string(kSpeciesNames[k]) + ".csv")).string(), true);
    detail::require(tr.X.cols() == in.X.cols(), ErrorKind::data,
                    std::string(kSpeciesNames[k]) + " training inputs differ in dimension");
    opt.seed = derive_seed(a.seed, streams::replicate, k);
    const FitResult r = fit_predict(method, tr.X, *tr.y, in.X, std::nullopt, opt);
    if (r.pred.failure_count() > 0) {
      throw NumericalError(std::string(kSpeciesNames[k]) + ": " +
                           std::to_string(r.pred.failure_count()) + " points failed");
    }
    per.push_back(r.pred.mean);
  }
  const Eigen::VectorXd drag = ensemble_species(per, mixes);
  Eigen::MatrixXd data(in.X.rows(), kSpecies + 1);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < kSpecies; ++k) {
    data.col(static_cast<Eigen::Index>(k)) = per[k];
    names.push_back(std::string("C_") + kSpeciesNames[k]);
  }
  data.col(kSpecies) = drag;
  names.push_back("drag");
  emit(a.out, table(names, data));
  if (in.y) {
    std::ostream& m = a.out == "-" ? std::cerr : std::cout;
    m << "metric,value\nrmse," << format_real(rmse(drag, *in.y)) << '\n';
    if ((in.y->array().abs() >= 1e-12).all()) m << "rmspe," << format_real(rmspe(drag, *in.y)) << '\n';
  }
}

int fail(std::string_view kind, const std::string& msg, int code) {
  std::string line = msg;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::cerr << "error: " << kind << ": " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local approximate GP emulation with global prescaling and path design"};
  app.require_subcommand(1);

  GenDesignArgs gd;
  auto* c_gd = app.add_subcommand("gen-design", "LHS design with test-function responses");
  c_gd->add_option("--fn", gd.fn)->check(CLI::IsMember({"borehole", "michalewicz", "fn2d"}));
  c_gd->add_option("--n", gd.n)->check(CLI::PositiveNumber);
  c_gd->add_option("--p", gd.p, "inputs (default: 8 borehole, 4 michalewicz, 2 fn2d)")
      ->check(CLI::NonNegativeNumber);
  c_gd->add_option("--M", gd.M, "Michalewicz steepness")->check(CLI::PositiveNumber);
  c_gd->add_option("--seed", gd.seed);
  c_gd->add_option("--out", gd.out);

  GenPathsArgs gp;
  auto* c_gp = app.add_subcommand("gen-paths", "random 2d reference paths");
  c_gp->add_option("--count", gp.count)->check(CLI::NonNegativeNumber);
  c_gp->add_option("--resolution", gp.resolution);
  c_gp->add_option("--rect", gp.rect, "xmin,xmax,ymin,ymax");
  c_gp->add_option("--seed", gp.seed);
  c_gp->add_flag("--with-y", gp.with_y, "append the 2d test-function response");
  c_gp->add_option("--out", gp.out);

  GlobalScaleArgs gs;
  auto* c_gs = app.add_subcommand("global-scale", "global lengthscales from subsamples");
  c_gs->add_option("--train", gs.train)->required();
  c_gs->add_option("--mode", gs.mode)->check(CLI::IsMember({"blhs", "random"}));
  c_gs->add_option("--m", gs.m, "blocks per dimension (0 = auto)")->check(CLI::NonNegativeNumber);
  c_gs->add_option("--boot", gs.boot)->check(CLI::PositiveNumber);
  c_gs->add_option("--seed", gs.seed);
  c_gs->add_option("--nugget", gs.nugget)->check(CLI::PositiveNumber);
  c_gs->add_option("--threads", gs.threads);
  c_gs->add_option("--out", gs.out);

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "local GP prediction at test inputs");
  c_pr->add_option("--method", pr.method)->required();
  c_pr->add_option("--train", pr.train)->required();
  c_pr->add_option("--test", pr.test)->required();
  c_pr->add_option("--n0", pr.n0);
  c_pr->add_option("--n", pr.n);
  c_pr->add_option("--nprime", pr.nprime, "nearest candidates searched");
  c_pr->add_option("--m", pr.m)->check(CLI::NonNegativeNumber);
  c_pr->add_option("--boot", pr.boot)->check(CLI::PositiveNumber);
  c_pr->add_option("--threads", pr.threads);
  c_pr->add_option("--seed", pr.seed);
  c_pr->add_option("--nugget", pr.nugget)->check(CLI::PositiveNumber);
  c_pr->add_option("--scale", pr.scale, "global-scale output to prescale with");
  c_pr->add_option("--out", pr.out);

  PathPredictArgs pp;
  auto* c_pp = app.add_subcommand("path-predict", "joint prediction along reference paths");
  c_pp->add_option("--method", pp.method)
      ->check(CLI::IsMember({"alc-ex", "alc-opt", "nn-joint", "alc-pw", "nn-pw"}));
  c_pp->add_option("--train", pp.train)->required();
  c_pp->add_option("--paths", pp.paths)->required();
  c_pp->add_option("--n0", pp.n0);
  c_pp->add_option("--n", pp.n);
  c_pp->add_option("--nprime", pp.nprime, "candidates (0 = automatic)");
  c_pp->add_option("--draws", pp.draws)->check(CLI::NonNegativeNumber);
  c_pp->add_option("--threads", pp.threads);
  c_pp->add_option("--seed", pp.seed);
  c_pp->add_option("--scale", pp.scale, "fixed lengthscales (global-scale output)");
  c_pp->add_option("--out-pred", pp.out_pred);
  c_pp->add_option("--out-cov", pp.out_cov);
  c_pp->add_option("--out-draws", pp.out_draws);

  BenchArgs bn;
  auto* c_bn = app.add_subcommand("bench", "desk-scale benchmark experiments");
  c_bn->add_option("--experiment", bn.experiment)
      ->required()
      ->check(CLI::IsMember({"borehole-grid", "michalewicz-grid", "paths-2d", "paths-4d"}));
  c_bn->add_option("--scale", bn.scale, "training size as a fraction of 1e4");
  c_bn->add_option("--reps", bn.reps, "replicates, or paths for the path experiments");
  c_bn->add_option("--seed", bn.seed);
  c_bn->add_option("--threads", bn.threads);
  c_bn->add_option("--n", bn.n, "local design size");
  c_bn->add_option("--methods", bn.methods, "comma-separated comparator subset");
  c_bn->add_option("--outdir", bn.outdir);

  EnsembleArgs en;
  auto* c_en = app.add_subcommand("ensemble", "mixture drag from six species models");
  c_en->add_option("--models", en.models, "directory with O.csv O2.csv N.csv N2.csv He.csv H.csv")
      ->required();
  c_en->add_option("--mix", en.mix, "mole fractions, columns O,O2,N,N2,He,H")->required();
  c_en->add_option("--inputs", en.inputs)->required();
  c_en->add_option("--method", en.method);
  c_en->add_option("--n0", en.n0);
  c_en->add_option("--n", en.n);
  c_en->add_option("--nprime", en.nprime);
  c_en->add_option("--threads", en.threads);
  c_en->add_option("--seed", en.seed);
  c_en->add_option("--out", en.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), kExitUsage);
  }

  try {
    if (*c_gd) gen_design(gd);
    if (*c_gp) gen_paths(gp);
    if (*c_gs) global_scale(gs);
    if (*c_pr) predict(pr);
    if (*c_pp) path_predict(pp);
    if (*c_bn) bench(bn);
    if (*c_en) ensemble(en);
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::usage  ? kExitUsage
                     : e.kind() == ErrorKind::data ? kExitData
                                                   : kExitNumerical;
    return fail(to_string(e.kind()), e.what(), code);
  } catch (const fs::filesystem_error& e) {
    return fail("data", e.what(), kExitData);
  }
  return 0;
}
