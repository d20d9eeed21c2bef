#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "lagp/benchmarks.hpp"
#include "lagp/csv.hpp"
#include "lagp/pipeline.hpp"
#include "test_util.hpp"

using namespace lagp;
using lagp::testing::uniform_matrix;
using lagp::testing::uniform_vector;

namespace {

Eigen::VectorXd borehole_all(const Eigen::MatrixXd& X) {
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = borehole(X.row(i));
  return y;
}

Eigen::VectorXd smooth_3d(const Eigen::MatrixXd& X) {
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    y[i] = std::sin(4 * X(i, 0)) + X(i, 1) * X(i, 1) + 0.1 * X(i, 2);
  return y;
}

}  // namespace

TEST(MethodNames, RoundTripAllEighteen) {
  const auto grid = method_grid();
  ASSERT_EQ(grid.size(), 18u);
  std::set<std::string> names;
  for (const auto& m : grid) {
    const std::string s = format_method(m);
    names.insert(s);
    EXPECT_EQ(parse_method(s), m) << s;
  }
  EXPECT_EQ(names.size(), 18u);
  EXPECT_TRUE(names.contains("alcsep2.sb"));
  EXPECT_TRUE(names.contains("nn.s"));
  for (const char* bad : {"nn2", "alc.x", "knn", "alcsep3", ""}) {
    EXPECT_THROW(parse_method(bad), UsageError) << bad;
  }
}

TEST(FitPredict, InterpolatesTrainingPoints) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd X = uniform_matrix(rng, 300, 3);
  const Eigen::VectorXd y = smooth_3d(X);
  FitOptions opt;
  opt.n = 30;
  opt.nugget = 1e-10;
  const Eigen::MatrixXd Xt = X.topRows(25);
  const Eigen::VectorXd yt = y.head(25);
  const FitResult r = fit_predict(parse_method("nn"), X, y, Xt, yt, opt);
  ASSERT_TRUE(r.rmse);
  EXPECT_LT(*r.rmse, 1e-5);
}

TEST(FitPredict, AllComparatorsRun) {
  const Eigen::MatrixXd X = lhs_design(500, 8, 2);
  const Eigen::VectorXd y = borehole_all(X);
  const Eigen::MatrixXd Xt = lhs_design(20, 8, 3);
  const Eigen::VectorXd yt = borehole_all(Xt);
  FitOptions opt;
  opt.n = 30;
  opt.candidate_limit = 200;
  opt.bootstrap_count = 3;
  opt.seed = 4;
  for (const MethodSpec& m : method_grid()) {
    const FitResult r = fit_predict(m, X, y, Xt, yt, opt);
    EXPECT_EQ(r.pred.failure_count(), 0u) << format_method(m);
    ASSERT_TRUE(r.rmse) << format_method(m);
    // Far better than predicting the mean.
    const double sd = std::sqrt((yt.array() - yt.mean()).square().mean());
    EXPECT_LT(*r.rmse, 0.25 * sd) << format_method(m);
    EXPECT_EQ(r.global_scale.size(), m.prescale == PrescaleMode::none ? 0 : 8);
    EXPECT_TRUE(r.rmspe.has_value());
  }
}

TEST(FitPredict, DeterministicAcrossThreadCounts) {
  const Eigen::MatrixXd X = lhs_design(400, 3, 5);
  const Eigen::VectorXd y = smooth_3d(X);
  const Eigen::MatrixXd Xt = lhs_design(16, 3, 6);
  FitOptions opt;
  opt.n = 25;
  opt.bootstrap_count = 5;
  opt.seed = 9;
  const MethodSpec m = parse_method("alcsep2.sb");
  const FitResult a = fit_predict(m, X, y, Xt, std::nullopt, opt);
  opt.threads = 4;
  const FitResult b = fit_predict(m, X, y, Xt, std::nullopt, opt);
  EXPECT_EQ(a.pred.mean, b.pred.mean);
  EXPECT_EQ(a.pred.scale2, b.pred.scale2);
  EXPECT_EQ(a.global_scale, b.global_scale);
  EXPECT_FALSE(a.rmse.has_value());
}

TEST(FitPredict, PrescaleMatchesWeightedRawFit) {
  // Without local MLE, a unit isotropic fit on prescaled inputs is the raw
  // fit with separable lengthscales theta and NN weights 1/theta.
  const Eigen::MatrixXd X = lhs_design(600, 3, 7);
  const Eigen::VectorXd y = smooth_3d(X);
  const Eigen::MatrixXd Xt = lhs_design(20, 3, 8);
  const Eigen::Vector3d theta(0.2, 1.5, 4.0);
  for (DesignMethod dm : {DesignMethod::nn, DesignMethod::alc}) {
    SearchConfig cfg;
    cfg.n = 30;
    cfg.candidate_limit = 200;
    cfg.method = dm;
    cfg.local_mle = false;
    const SurfacePrediction scaled = predict_surface(prescale(X, theta), y, prescale(Xt, theta), cfg,
                                                     Hyperparams::isotropic(3, 1.0, 1e-6), 1);
    cfg.metric_weights = theta.cwiseInverse();
    const SurfacePrediction raw = predict_surface(X, y, Xt, cfg, Hyperparams(theta, 1e-6), 1);
    EXPECT_LT((scaled.mean - raw.mean).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(((scaled.scale2 - raw.scale2).array() / raw.scale2.array()).abs().maxCoeff(), 1e-6);
  }
}

TEST(FitPredict, SuppliedGlobalScaleSkipsSubsampling) {
  const Eigen::MatrixXd X = lhs_design(300, 2, 10);
  const Eigen::VectorXd y = smooth_3d((Eigen::MatrixXd(300, 3) << X, X.col(0)).finished());
  FitOptions opt;
  opt.n = 20;
  opt.global_scale = Eigen::Vector2d(0.3, 0.7);
  const FitResult r = fit_predict(parse_method("alc.sb"), X, y, X.topRows(5), std::nullopt, opt);
  EXPECT_EQ(r.global_scale, *opt.global_scale);
}

TEST(FitPredict, RejectsMismatchedShapes) {
  const Eigen::MatrixXd X = lhs_design(50, 2, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(49);
  EXPECT_THROW(fit_predict(parse_method("nn"), X, y, X, std::nullopt, FitOptions{}), DataError);
}

TEST(Ensemble, CombinesSpecies) {
  std::vector<Eigen::VectorXd> per(6, Eigen::VectorXd::Constant(3, 2.0));
  std::vector<SpeciesMixture> mix(3);
  for (auto& m : mix) m.mole_fraction = {0.2, 0.1, 0.3, 0.1, 0.2, 0.1};
  EXPECT_TRUE(ensemble_species(per, mix).isApproxToConstant(2.0, 1e-15));
  mix[1].mole_fraction = {0, 0, 0, 0, 1, 0};
  per[4][1] = 7.0;
  EXPECT_EQ(ensemble_species(per, mix)[1], 7.0);
  per.pop_back();
  EXPECT_THROW(ensemble_species(per, mix), UsageError);
}

TEST(CrossValidation, FoldsPartitionRows) {
  const auto a = fold_assignment(103, 10, 4);
  EXPECT_EQ(a, fold_assignment(103, 10, 4));
  EXPECT_NE(a, fold_assignment(103, 10, 5));
  std::vector<int> sizes(10, 0);
  for (int f : a) ++sizes[static_cast<std::size_t>(f)];
  for (int s : sizes) EXPECT_TRUE(s == 10 || s == 11);
  EXPECT_THROW(fold_assignment(5, 6, 1), UsageError);
  EXPECT_THROW(fold_assignment(5, 1, 1), UsageError);
}

TEST(CrossValidation, LeaveOneOutOnTinyData) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd X = uniform_matrix(rng, 12, 2);
  const Eigen::VectorXd y = uniform_vector(rng, 12, 1, 2);
  FitOptions opt;
  opt.n0 = 3;
  opt.n = 8;
  const CvSummary cv = cv_experiment(parse_method("nn"), X, y, 12, opt);
  ASSERT_EQ(cv.folds.size(), 12u);
  for (const auto& f : cv.folds) {
    EXPECT_EQ(f.n_test, 1);
    EXPECT_TRUE(std::isfinite(f.rmse));
  }
  EXPECT_LE(cv.rmse_quantiles[0], cv.rmse_quantiles[1]);
  EXPECT_LE(cv.rmse_quantiles[1], cv.rmse_quantiles[2]);
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd X = uniform_matrix(rng, 7, 3, -1e5, 1e5);
  const Eigen::VectorXd y = uniform_vector(rng, 7, -1e-9, 1e-9);
  std::stringstream ss;
  print_csv(ss, from_dataset(X, &y));
  const Dataset d = to_dataset(parse_csv(ss), true);
  EXPECT_EQ(d.X, X);
  EXPECT_EQ(*d.y, y);
}

TEST(Csv, BadInputIsDataError) {
  std::stringstream a("x1,y\n1,2\n3\n");
  EXPECT_THROW(parse_csv(a), DataError);
  std::stringstream b("x1,y\n1,abc\n");
  EXPECT_THROW(parse_csv(b), DataError);
  std::stringstream c("x1\n1\n");
  EXPECT_THROW(to_dataset(parse_csv(c), true), DataError);
}
