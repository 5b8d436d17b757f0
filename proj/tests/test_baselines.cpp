#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnpnc/baselines.hpp"
#include "bnpnc/errors.hpp"
#include "bnpnc/identification.hpp"
#include "bnpnc/rng.hpp"
#include "bnpnc/simulation.hpp"
#include "test_support.hpp"

using namespace bnpnc;
using baselines::FitMode;
using baselines::FitSpec;

namespace {

ModelConfig smoke_config(int K, int iterations, int burn_in, std::uint64_t seed) {
  ModelConfig config;
  config.truncation = K;
  config.n_knots = 3;
  config.iterations = iterations;
  config.burn_in = burn_in;
  config.thinning = 2;
  config.seed = seed;
  config.grid.points = 40;
  return config;
}

}  // namespace

TEST_CASE("linear_nc recovers the transparent generator's slope") {
  const Dataset data = testsup::linear_nc_dataset(1001, 5000);
  baselines::LinearNcOptions options;
  options.bootstrap = 400;
  const auto fit = baselines::linear_nc(data, options);
  CHECK(std::fabs(fit.estimate - 2.0) <= 0.05);
  CHECK(fit.ci_lower < 2.0);
  CHECK(fit.ci_upper > 2.0);
  CHECK(fit.ci_lower < fit.estimate);
  CHECK(fit.estimate < fit.ci_upper);
  CHECK(fit.bootstrap_resamples == 400);
  CHECK(fit.bootstrap_failures == 0);
}

TEST_CASE("linear_nc equals the corrected-slope formula on its own coefficients") {
  const Dataset data = testsup::linear_nc_dataset(77, 800);
  baselines::LinearNcOptions options;
  options.bootstrap = 0;
  const auto fit = baselines::linear_nc(data, options);
  const double recomputed =
      identification::component_effect(fit.theta_y.transpose(), fit.theta_w, options.tol) *
      fit.scale_factor;
  CHECK(fit.estimate == recomputed);  // bitwise: same inputs, same expression
}

TEST_CASE("linear_nc matches an independent OLS route") {
  const Dataset data = testsup::linear_nc_dataset(55, 3000);
  baselines::LinearNcOptions options;
  options.bootstrap = 0;
  options.standardize = false;
  const auto fit = baselines::linear_nc(data, options);
  Eigen::MatrixXd design(data.n(), 3);
  design.col(0).setOnes();
  design.col(1) = data.x;
  design.col(2) = data.z;
  const Eigen::VectorXd ty = testsup::ols_oracle(design, data.y);
  const Eigen::VectorXd tw = testsup::ols_oracle(design, data.w);
  const double oracle = ty[1] - ty[2] * (tw[1] / tw[2]);
  CHECK(fit.estimate == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("zero x->w signal reduces linear_nc to the plain OLS slope") {
  RngStream rng(501);
  const Eigen::Index n = 20000;
  Dataset d;
  d.y.resize(n);
  d.x.resize(n);
  d.z.resize(n);
  d.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.normal();
    d.x[i] = rng.normal();  // exposure independent of the confounder
    d.z[i] = u + rng.normal(0.0, 0.3);
    d.w[i] = -2.0 * u + rng.normal(0.0, 0.3);
    d.y[i] = 2.0 * d.x[i] + rng.normal(0.0, 0.3);
  }
  baselines::LinearNcOptions options;
  options.bootstrap = 0;
  const auto fit = baselines::linear_nc(d, options);
  Eigen::MatrixXd design(n, 3);
  design.col(0).setOnes();
  design.col(1) = d.x;
  design.col(2) = d.z;
  const double ols_slope = testsup::ols_oracle(design, d.y)[1];
  CHECK(std::fabs(fit.estimate - ols_slope) < 0.02);
  CHECK(std::fabs(fit.estimate - 2.0) < 0.02);
}

TEST_CASE("linear_nc enforces the identification tolerance") {
  const Dataset data = testsup::linear_nc_dataset(61, 500);
  baselines::LinearNcOptions options;
  options.tol = 10.0;  // nothing clears a tolerance this size
  CHECK_THROWS_AS(baselines::linear_nc(data, options), IdentificationError);
}

TEST_CASE("fit mode parsing") {
  CHECK(baselines::parse_fit_mode("bnp-nc") == FitMode::BnpNc);
  CHECK(baselines::parse_fit_mode("yx") == FitMode::Yx);
  CHECK(baselines::parse_fit_mode("yxu") == FitMode::Yxu);
  CHECK(baselines::parse_fit_mode("linear-nc") == FitMode::LinearNc);
  CHECK_THROWS_AS(baselines::parse_fit_mode("ols"), ConfigError);
  CHECK(baselines::fit_mode_name(FitMode::Yxu) == "yxu");
}

TEST_CASE("K=1 negative-control fit recovers the linear generator's slope") {
  const Dataset data = testsup::linear_nc_dataset(2024, 4000);
  FitSpec spec;
  spec.mode = FitMode::BnpNc;
  spec.config = smoke_config(1, 1500, 500, 313);
  const auto fit = baselines::fit_cerf(data, spec);
  // posterior mean slope on the original scale
  std::vector<double> slopes;
  for (const auto& draw : fit.draws) {
    slopes.push_back(
        identification::component_effect(draw.theta_y.row(0), draw.theta_w, 1e-6) *
        (fit.transforms.y.scale / fit.transforms.x.scale));
  }
  CHECK(std::fabs(testsup::mean_of(slopes) - 2.0) < 0.1);
  CHECK(fit.cerf.identification_failures == 0);
  CHECK(fit.cerf.draws.rows() == 500);
  CHECK(fit.cerf.grid.size() == 40);
}

TEST_CASE("yx mode with K=1 is ordinary Bayesian simple regression") {
  RngStream rng(881);
  const Eigen::Index n = 2500;
  Dataset d;
  d.y.resize(n);
  d.x.resize(n);
  d.z.resize(n);
  d.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.x[i] = rng.normal();
    d.z[i] = rng.normal();
    d.w[i] = rng.normal();
    d.y[i] = 0.5 + 1.3 * d.x[i] + rng.normal(0.0, 0.6);
  }
  FitSpec spec;
  spec.mode = FitMode::Yx;
  spec.config = smoke_config(1, 1200, 400, 99);
  spec.config.standardize = false;
  const auto fit = baselines::fit_cerf(d, spec);
  std::vector<double> slopes;
  for (const auto& draw : fit.draws) {
    slopes.push_back(draw.theta_y(0, 1));
  }
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = d.x;
  const Eigen::VectorXd ls = testsup::ols_oracle(design, d.y);
  CHECK(std::fabs(testsup::mean_of(slopes) - ls[1]) < 0.05);
  // the fitted curve is a straight line through the grid
  const auto& bands = fit.cerf.bands;
  const Eigen::VectorXd& grid = fit.cerf.grid;
  const double slope_lo =
      (bands.median[10] - bands.median[0]) / (grid[10] - grid[0]);
  const double slope_hi =
      (bands.median[30] - bands.median[20]) / (grid[30] - grid[20]);
  CHECK(std::fabs(slope_lo - slope_hi) < 0.15);
}

TEST_CASE("yxu mode needs the confounder column") {
  Dataset d = testsup::linear_nc_dataset(11, 300);
  d.u_hidden.resize(0);
  FitSpec spec;
  spec.mode = FitMode::Yxu;
  spec.config = smoke_config(2, 60, 20, 5);
  CHECK_THROWS_AS(baselines::fit_cerf(d, spec), ConfigError);
}

TEST_CASE("constant confounder column fails standardization") {
  Dataset d = testsup::linear_nc_dataset(12, 300);
  d.u_hidden.setConstant(1.0);
  FitSpec spec;
  spec.mode = FitMode::Yxu;
  spec.config = smoke_config(2, 60, 20, 5);
  CHECK_THROWS_AS(baselines::fit_cerf(d, spec), ValidationError);
}

TEST_CASE("an irrelevant confounder leaves yxu close to yx") {
  RngStream rng(771);
  const Eigen::Index n = 2000;
  Dataset d;
  d.y.resize(n);
  d.x.resize(n);
  d.z.resize(n);
  d.w.resize(n);
  d.u_hidden.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.x[i] = rng.normal();
    d.z[i] = rng.normal();
    d.w[i] = rng.normal();
    d.u_hidden[i] = rng.normal();  // unrelated to y
    d.y[i] = 1.0 + 0.8 * d.x[i] + rng.normal(0.0, 0.5);
  }
  FitSpec yx;
  yx.mode = FitMode::Yx;
  yx.config = smoke_config(1, 900, 300, 41);
  FitSpec yxu = yx;
  yxu.mode = FitMode::Yxu;
  const auto fit_yx = baselines::fit_cerf(d, yx);
  const auto fit_yxu = baselines::fit_cerf(d, yxu);
  const Eigen::VectorXd diff = fit_yx.cerf.bands.median - fit_yxu.cerf.bands.median;
  CHECK(diff.cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("unconfounded data: yx and bnp-nc agree within bands") {
  RngStream rng(661);
  const Eigen::Index n = 1500;
  Dataset d;
  d.y.resize(n);
  d.x.resize(n);
  d.z.resize(n);
  d.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.normal();  // drives only the negative controls
    d.x[i] = rng.normal(2.0, 1.0);
    d.z[i] = u + rng.normal(0.0, 0.4);
    d.w[i] = -u + rng.normal(0.0, 0.4);
    d.y[i] = 1.0 + 0.9 * d.x[i] + rng.normal(0.0, 0.4);
  }
  FitSpec nc;
  nc.mode = FitMode::BnpNc;
  nc.config = smoke_config(5, 900, 300, 17);
  FitSpec yx = nc;
  yx.mode = FitMode::Yx;
  const auto fit_nc = baselines::fit_cerf(d, nc);
  const auto fit_yx = baselines::fit_cerf(d, yx);
  // the yx median lies inside the (wider) nc 95% band over the central grid
  const auto& levels = fit_nc.cerf.bands.levels;
  const auto l95 = static_cast<Eigen::Index>(
      std::find(levels.begin(), levels.end(), 0.95) - levels.begin());
  int inside = 0, central = 0;
  for (Eigen::Index g = 8; g < 32; ++g) {
    ++central;
    if (fit_nc.cerf.bands.lower(l95, g) <= fit_yx.cerf.bands.median[g] &&
        fit_yx.cerf.bands.median[g] <= fit_nc.cerf.bands.upper(l95, g)) {
      ++inside;
    }
  }
  CHECK(inside >= central * 8 / 10);
}

TEST_CASE("confounded scenario data: the correction beats the naive fit") {
  Dataset d = simulation::simulate(simulation::Scenario{2, 2000, 3100});
  d.u_hidden.resize(0);
  FitSpec nc;
  nc.mode = FitMode::BnpNc;
  nc.config = smoke_config(12, 2000, 800, 31);
  nc.config.n_knots = 4;
  FitSpec yx = nc;
  yx.mode = FitMode::Yx;
  const auto fit_nc = baselines::fit_cerf(d, nc);
  const auto fit_yx = baselines::fit_cerf(d, yx);
  const Eigen::VectorXd truth = simulation::true_cerf(2, fit_nc.cerf.grid);
  double rmse_nc = 0.0, rmse_yx = 0.0;
  int count = 0;
  for (Eigen::Index g = 6; g < 34; ++g) {  // central part of the 40-point grid
    rmse_nc += std::pow(fit_nc.cerf.bands.median[g] - truth[g], 2);
    rmse_yx += std::pow(fit_yx.cerf.bands.median[g] - truth[g], 2);
    ++count;
  }
  rmse_nc = std::sqrt(rmse_nc / count);
  rmse_yx = std::sqrt(rmse_yx / count);
  CHECK(rmse_nc < rmse_yx);
}

TEST_CASE("partial correlation and Fisher intervals behave") {
  RngStream rng(321);
  const Eigen::Index n = 2000;
  Eigen::VectorXd a(n), b(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c[i] = rng.normal();
    a[i] = 0.8 * c[i] + rng.normal(0.0, 0.5);
    b[i] = -0.6 * c[i] + rng.normal(0.0, 0.5);
  }
  // a and b are dependent marginally but independent given c
  const double marginal = baselines::partial_correlation(a, b, Eigen::MatrixXd(n, 0));
  const double conditional = baselines::partial_correlation(a, b, c);
  CHECK(marginal < -0.3);
  CHECK(std::fabs(conditional) < 0.08);

  const auto ci = baselines::fisher_ci(conditional, n, 1, 0.95);
  CHECK(ci.lower < conditional);
  CHECK(conditional < ci.upper);
  // width shrinks like 1/sqrt(n - c - 3)
  const auto narrow = baselines::fisher_ci(0.0, 1000, 0, 0.95);
  const auto wide = baselines::fisher_ci(0.0, 100, 0, 0.95);
  const double ratio = (wide.upper - wide.lower) / (narrow.upper - narrow.lower);
  CHECK(ratio == doctest::Approx(std::sqrt(997.0 / 97.0)).epsilon(0.02));

  CHECK_THROWS_AS(baselines::partial_correlation(a.head(4), b.head(4), c.head(4)),
                  ValidationError);
}

TEST_CASE("assumption tests on independent columns find no confounder signal") {
  RngStream rng(432);
  const Eigen::Index n = 2000;
  Dataset d;
  d.y.resize(n);
  d.x.resize(n);
  d.z.resize(n);
  d.w.resize(n);
  d.u_hidden.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.y[i] = rng.normal();
    d.x[i] = rng.normal();
    d.z[i] = rng.normal();
    d.w[i] = rng.normal();
    d.u_hidden[i] = rng.normal();
  }
  const auto tests = baselines::assumption_tests(d);
  REQUIRE(tests.size() == 4);
  for (const auto& t : tests) {
    CHECK(std::fabs(t.estimate) < 0.06);
    CHECK(t.ci_lower <= t.estimate);
    CHECK(t.estimate <= t.ci_upper);
  }
  // conditional independencies hold; the informativeness assumptions fail
  CHECK(tests[0].assumption == "A4");
  CHECK(tests[0].holds);
  CHECK(tests[1].holds);
  CHECK_FALSE(tests[2].holds);  // A6: W _||_ U not rejected
  CHECK_FALSE(tests[3].holds);  // A7
  CHECK(tests[2].conclusion == "A6 violated");
}

TEST_CASE("assumption tests on scenario data endorse the design") {
  const Dataset d = simulation::simulate(simulation::Scenario{1, 4000, 5150});
  const auto tests = baselines::assumption_tests(d);
  REQUIRE(tests.size() == 4);
  CHECK(tests[0].holds);  // X _||_ W | U by construction
  CHECK(tests[1].holds);  // W _||_ Z | U by construction
  CHECK(tests[2].holds);  // W depends on U strongly
  CHECK(tests[2].ci_upper < 0.0);
  CHECK(tests[3].holds);  // U-Z partial correlation given X
}

TEST_CASE("assumption tests require the confounder column and enough rows") {
  Dataset d = testsup::linear_nc_dataset(3, 100);
  Dataset no_u = d;
  no_u.u_hidden.resize(0);
  CHECK_THROWS_AS(baselines::assumption_tests(no_u), ConfigError);

  Dataset tiny = testsup::linear_nc_dataset(4, 4);
  CHECK_THROWS_AS(baselines::assumption_tests(tiny), ValidationError);
}

TEST_CASE("the assumption table formats one row per test") {
  const Dataset d = testsup::linear_nc_dataset(5, 200);
  const auto tests = baselines::assumption_tests(d);
  const std::string table = baselines::format_assumption_table(tests);
  CHECK(table.find("A4") != std::string::npos);
  CHECK(table.find("A7") != std::string::npos);
  CHECK(table.find("conclusion") != std::string::npos);
}
