#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnpnc/errors.hpp"
#include "bnpnc/rng.hpp"
#include "bnpnc/simulation.hpp"
#include "test_support.hpp"

using namespace bnpnc;
using simulation::Scenario;

namespace {

double slope_on(const Eigen::VectorXd& response, const Eigen::VectorXd& regressor) {
  Eigen::MatrixXd design(regressor.size(), 2);
  design.col(0).setOnes();
  design.col(1) = regressor;
  return testsup::ols_oracle(design, response)[1];
}

}  // namespace

TEST_CASE("simulated moments match the generating mechanism") {
  const Dataset d = simulation::simulate(Scenario{2, 1000000, 515});
  CHECK(std::fabs(d.u_hidden.mean() - 1.0) < 0.002);
  const double var_u = (d.u_hidden.array() - d.u_hidden.mean()).square().sum() /
                       static_cast<double>(d.n() - 1);
  CHECK(std::fabs(var_u - 0.2) < 0.002);
  CHECK(std::fabs(slope_on(d.w, d.u_hidden) - (-2.0)) < 0.01);
  CHECK(std::fabs(slope_on(d.z, d.u_hidden) - 1.5) < 0.01);
  CHECK(std::fabs(slope_on(d.x, d.u_hidden) - 4.0) < 0.01);
}

TEST_CASE("scenario 1 regression slopes recover the generator") {
  const Dataset d = simulation::simulate(Scenario{1, 1000000, 99});
  CHECK(std::fabs(slope_on(d.w, d.u_hidden) - (-2.0)) < 0.01);
  // exposure intercept differs per scenario; slope on U is always 4
  CHECK(std::fabs(slope_on(d.x, d.u_hidden) - 4.0) < 0.01);
}

TEST_CASE("simulation is deterministic in the seed") {
  const Dataset a = simulation::simulate(Scenario{3, 500, 7});
  const Dataset b = simulation::simulate(Scenario{3, 500, 7});
  const Dataset c = simulation::simulate(Scenario{3, 500, 8});
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.u_hidden - b.u_hidden).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - c.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("invalid scenarios are rejected") {
  CHECK_THROWS_AS(simulation::simulate(Scenario{5, 100, 1}), ConfigError);
  CHECK_THROWS_AS(simulation::simulate(Scenario{0, 100, 1}), ConfigError);
  CHECK_THROWS_AS(simulation::true_cerf(9, 1.0), ConfigError);
}

TEST_CASE("true_cerf reference values") {
  CHECK(simulation::true_cerf(1, 5.5) == 14.0);
  CHECK(simulation::true_cerf(1, 5.5 - 1e-9) == doctest::Approx(14.0).epsilon(1e-8));
  CHECK(simulation::true_cerf(1, 2.0) == doctest::Approx(7.0));
  CHECK(simulation::true_cerf(2, 6.0) == doctest::Approx(-6.0));
  CHECK(simulation::true_cerf(3, 5.0) == doctest::Approx(3.2));
  CHECK(simulation::true_cerf(4, 6.0) ==
        doctest::Approx(0.40333281915714647).epsilon(1e-14));
}

TEST_CASE("analytic truth matches Monte Carlo integration over U") {
  RngStream rng(616);
  const int m = 200000;
  std::vector<double> u(m);
  for (auto& v : u) v = rng.normal(1.0, std::sqrt(0.2));
  const double xs[5] = {2.0, 4.0, 5.5, 6.5, 8.0};
  for (int id = 1; id <= 4; ++id) {
    for (double x : xs) {
      std::vector<double> cond(m);
      for (int i = 0; i < m; ++i) {
        switch (id) {
          case 1:
            cond[i] = (x < 5.5) ? 1.0 + 2.0 * x + 2.0 * u[i] : -16.0 + 5.0 * x + 2.5 * u[i];
            break;
          case 2:
            cond[i] = -10.0 + 2.2 * (x - 6.0) * (x - 6.0) + 4.0 * u[i];
            break;
          case 3:
            cond[i] = 1.5 + (x >= 5.0 ? 1.0 : -1.0) * std::sqrt(std::fabs(x - 5.0)) + 1.7 * u[i];
            break;
          default:
            cond[i] = -2.0 * std::exp(-1.4 * (x - 6.0)) + 0.8 * std::exp(u[i]);
            break;
        }
      }
      const double mc = testsup::mean_of(cond);
      const double se = testsup::sd_of(cond) / std::sqrt(static_cast<double>(m));
      CHECK(std::fabs(simulation::true_cerf(id, x) - mc) < 3 * se + 1e-12);
    }
  }
}

TEST_CASE("aggregation scores a perfect estimate as perfect") {
  Eigen::VectorXd grid(20);
  for (int g = 0; g < 20; ++g) grid[g] = 2.0 + 0.3 * g;
  const Eigen::VectorXd truth = simulation::true_cerf(2, grid);
  identification::CerfEstimate oracle;
  oracle.grid = grid;
  oracle.draws.resize(4, 20);
  for (int r = 0; r < 4; ++r) oracle.draws.row(r) = truth.transpose();
  const auto report = simulation::aggregate_replications(
      2, grid, truth, grid[2], grid[17], {0.5, 0.95}, {oracle, oracle});
  CHECK(report.pooled_rmse_central == 0.0);
  CHECK(report.mean_replicate_rmse_central == 0.0);
  CHECK(report.replicate_coverage.minCoeff() == 1.0);
  CHECK(report.pooled_coverage_by_level.minCoeff() == 1.0);
  CHECK(report.replicates == 2);
}

TEST_CASE("aggregation flags misses") {
  Eigen::VectorXd grid(4);
  grid << 1, 2, 3, 4;
  Eigen::VectorXd truth(4);
  truth << 0, 0, 0, 0;
  identification::CerfEstimate off;
  off.grid = grid;
  off.draws.resize(3, 4);
  off.draws.setConstant(5.0);  // bands nowhere near the truth
  const auto report =
      simulation::aggregate_replications(1, grid, truth, 1.0, 4.0, {0.95}, {off});
  CHECK(report.replicate_coverage.maxCoeff() == 0.0);
  CHECK(report.pooled_coverage_by_level[0] == 0.0);
  CHECK(report.pooled_rmse_central == doctest::Approx(5.0));
}

TEST_CASE("single-replicate smoke run produces a complete report") {
  simulation::ReplicationConfig config;
  config.scenario = 2;
  config.n = 400;
  config.replicates = 1;
  config.model.truncation = 5;
  config.model.iterations = 300;
  config.model.burn_in = 100;
  config.model.thinning = 2;
  config.model.n_knots = 3;
  config.model.seed = 2718;
  config.model.grid.points = 25;
  const auto report = simulation::run_replications(config);
  CHECK(report.grid.size() == 25);
  CHECK(report.truth.size() == 25);
  CHECK(report.replicates == 1);
  CHECK(report.failed_replicates.empty());
  CHECK(report.pooled_rmse_central > 0.0);
  CHECK(report.x_p10 < report.x_p90);
  // with one replicate, coverage entries are 0/1 indicators
  for (Eigen::Index l = 0; l < report.replicate_coverage.rows(); ++l) {
    for (Eigen::Index g = 0; g < report.replicate_coverage.cols(); ++g) {
      const double c = report.replicate_coverage(l, g);
      CHECK((c == 0.0 || c == 1.0));
    }
  }
  CHECK(report.replicate_seconds.size() == 1);
}
