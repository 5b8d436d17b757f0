#include "bnpnc/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "bnpnc/baselines.hpp"
#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"
#include "bnpnc/rng.hpp"

namespace bnpnc {
namespace simulation {

namespace {

constexpr double kVarU = 0.2;

double sign(double a) { return a >= 0.0 ? 1.0 : -1.0; }

void check_id(int id) {
  if (id < 1 || id > 4) {
    throw ConfigError("scenario id must be 1, 2, 3, or 4 (got " + std::to_string(id) + ")");
  }
}

}  // namespace

Dataset simulate(const Scenario& scenario) {
  check_id(scenario.id);
  if (scenario.n < 1) {
    throw ConfigError("scenario sample size must be >= 1");
  }
  RngStream rng = RngStream::derive(scenario.seed, {0x51Du, static_cast<std::uint64_t>(scenario.id)});
  const Eigen::Index n = scenario.n;
  Dataset d;
  d.y.resize(n);
  d.x.resize(n);
  d.z.resize(n);
  d.w.resize(n);
  d.u_hidden.resize(n);
  const double sd_u = std::sqrt(kVarU);
  const double sd_02 = std::sqrt(0.2);
  const double sd_03 = std::sqrt(0.3);
  const double sd_005 = std::sqrt(0.05);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.normal(1.0, sd_u);
    const double w = rng.normal(1.0 - 2.0 * u, sd_02);
    const double z = rng.normal(-1.0 + 1.5 * u, sd_02);
    double x = 0.0;
    double y = 0.0;
    switch (scenario.id) {
      case 1:
        x = rng.normal(1.5 + 4.0 * u, sd_02);
        y = (x < 5.5) ? rng.normal(1.0 + 2.0 * x + 2.0 * u, sd_03)
                      : rng.normal(-16.0 + 5.0 * x + 2.5 * u, sd_03);
        break;
      case 2:
        x = rng.normal(1.5 + 4.0 * u, sd_02);
        y = rng.normal(-10.0 + 2.2 * (x - 6.0) * (x - 6.0) + 4.0 * u, sd_02);
        break;
      case 3:
        x = rng.normal(1.0 + 4.0 * u, sd_02);
        y = rng.normal(1.5 + sign(x - 5.0) * std::sqrt(std::fabs(x - 5.0)) + 1.7 * u, sd_005);
        break;
      case 4:
        x = rng.normal(2.5 + 4.0 * u, sd_02);
        y = rng.normal(-2.0 * std::exp(-1.4 * (x - 6.0)) + 0.8 * std::exp(u), sd_02);
        break;
      default:
        break;
    }
    d.u_hidden[i] = u;
    d.w[i] = w;
    d.z[i] = z;
    d.x[i] = x;
    d.y[i] = y;
  }
  validate(d);
  return d;
}

double true_cerf(int id, double x) {
  check_id(id);
  switch (id) {
    case 1:
      return (x < 5.5) ? 3.0 + 2.0 * x : -13.5 + 5.0 * x;
    case 2:
      return -6.0 + 2.2 * (x - 6.0) * (x - 6.0);
    case 3:
      return 3.2 + sign(x - 5.0) * std::sqrt(std::fabs(x - 5.0));
    case 4:
      // E[exp(U)] = exp(mu + var/2) = exp(1.1) for U ~ N(1, 0.2).
      return -2.0 * std::exp(-1.4 * (x - 6.0)) + 0.8 * std::exp(1.1);
    default:
      return 0.0;
  }
}

Eigen::VectorXd true_cerf(int id, const Eigen::Ref<const Eigen::VectorXd>& grid) {
  Eigen::VectorXd values(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    values[g] = true_cerf(id, grid[g]);
  }
  return values;
}

namespace {

double central_rmse(const Eigen::VectorXd& grid, const Eigen::VectorXd& estimate,
                    const Eigen::VectorXd& truth, double lo, double hi) {
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    if (grid[g] >= lo && grid[g] <= hi) {
      const double e = estimate[g] - truth[g];
      sum += e * e;
      ++count;
    }
  }
  if (count == 0) {
    throw NumericalError("no grid points fall inside the central window");
  }
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace

ReplicationReport aggregate_replications(int scenario_id,
                                         const Eigen::Ref<const Eigen::VectorXd>& grid,
                                         const Eigen::Ref<const Eigen::VectorXd>& truth,
                                         double x_p10, double x_p90,
                                         const std::vector<double>& levels,
                                         const std::vector<identification::CerfEstimate>& fits) {
  if (fits.empty()) {
    throw NumericalError("no successful replicates to aggregate");
  }
  ReplicationReport report;
  report.scenario = scenario_id;
  report.grid = grid;
  report.truth = truth;
  report.levels = levels;
  std::sort(report.levels.begin(), report.levels.end());
  report.x_p10 = x_p10;
  report.x_p90 = x_p90;
  report.replicates = static_cast<int>(fits.size());

  const Eigen::Index G = grid.size();
  const auto L = static_cast<Eigen::Index>(report.levels.size());

  Eigen::Index total_rows = 0;
  for (const auto& fit : fits) {
    if (fit.draws.cols() != G) {
      throw NumericalError("replicates disagree on the evaluation grid");
    }
    total_rows += fit.draws.rows();
  }
  Eigen::MatrixXd pooled(total_rows, G);
  Eigen::Index at = 0;
  for (const auto& fit : fits) {
    pooled.middleRows(at, fit.draws.rows()) = fit.draws;
    at += fit.draws.rows();
  }
  const auto pooled_bands = identification::summarize(pooled, report.levels);
  report.pooled_median = pooled_bands.median;
  report.pooled_lower = pooled_bands.lower;
  report.pooled_upper = pooled_bands.upper;

  report.replicate_coverage = Eigen::MatrixXd::Zero(L, G);
  double rmse_sum = 0.0;
  for (const auto& fit : fits) {
    const auto bands = identification::summarize(fit.draws, report.levels);
    for (Eigen::Index l = 0; l < L; ++l) {
      for (Eigen::Index g = 0; g < G; ++g) {
        if (bands.lower(l, g) <= truth[g] && truth[g] <= bands.upper(l, g)) {
          report.replicate_coverage(l, g) += 1.0;
        }
      }
    }
    rmse_sum += central_rmse(report.grid, bands.median, report.truth, x_p10, x_p90);
  }
  report.replicate_coverage /= static_cast<double>(fits.size());
  report.mean_replicate_rmse_central = rmse_sum / static_cast<double>(fits.size());
  report.pooled_rmse_central =
      central_rmse(report.grid, report.pooled_median, report.truth, x_p10, x_p90);

  report.pooled_coverage_by_level.resize(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    Eigen::Index covered = 0;
    Eigen::Index central = 0;
    for (Eigen::Index g = 0; g < G; ++g) {
      if (grid[g] < x_p10 || grid[g] > x_p90) {
        continue;
      }
      ++central;
      if (report.pooled_lower(l, g) <= truth[g] && truth[g] <= report.pooled_upper(l, g)) {
        ++covered;
      }
    }
    report.pooled_coverage_by_level[l] =
        central > 0 ? static_cast<double>(covered) / static_cast<double>(central) : 0.0;
  }
  return report;
}

Scenario replicate_scenario(std::uint64_t master_seed, int scenario_id, Eigen::Index n, int r) {
  return Scenario{scenario_id, n,
                  RngStream::mix(master_seed, {static_cast<std::uint64_t>(scenario_id),
                                               static_cast<std::uint64_t>(r)})};
}

std::uint64_t replicate_fit_seed(std::uint64_t master_seed, int scenario_id, int r) {
  return RngStream::mix(master_seed, {static_cast<std::uint64_t>(scenario_id),
                                      static_cast<std::uint64_t>(r), 0xF17u});
}

ReplicationReport run_replications(const ReplicationConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  check_id(config.scenario);
  if (config.replicates < 1) {
    throw ConfigError("at least one replicate is required");
  }
  const std::uint64_t master = config.model.seed;

  // Replicate r's data and chains come from (master, scenario, r) substreams,
  // so any replicate can be reproduced alone. The evaluation grid and the
  // central window are fixed from replicate 1's exposure sample.
  const Dataset first = simulate(replicate_scenario(master, config.scenario, config.n, 1));
  const Eigen::VectorXd grid = make_grid(config.model.grid, first.x);
  const Eigen::VectorXd sorted_x = sorted_copy(first.x);
  const double x_p10 = quantile_type7_sorted(sorted_x, 0.10);
  const double x_p90 = quantile_type7_sorted(sorted_x, 0.90);

  std::vector<identification::CerfEstimate> fits(static_cast<size_t>(config.replicates));
  std::vector<char> ok(static_cast<size_t>(config.replicates), 0);
  std::vector<double> seconds(static_cast<size_t>(config.replicates), 0.0);
  std::atomic<int> next{1};
  std::mutex report_mutex;
  std::vector<std::pair<int, std::string>> failures;

  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r > config.replicates) {
        return;
      }
      const auto rep_start = std::chrono::steady_clock::now();
      try {
        Dataset data = simulate(replicate_scenario(master, config.scenario, config.n, r));
        data.u_hidden.resize(0);  // the sampler never sees the confounder
        baselines::FitSpec spec;
        spec.mode = baselines::FitMode::BnpNc;
        spec.config = config.model;
        spec.config.seed = replicate_fit_seed(master, config.scenario, r);
        spec.config.grid.explicit_points.assign(grid.data(), grid.data() + grid.size());
        const auto fit = baselines::fit_cerf(data, spec);
        fits[static_cast<size_t>(r - 1)] = fit.cerf;
        ok[static_cast<size_t>(r - 1)] = 1;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(report_mutex);
        failures.emplace_back(r, e.what());
      }
      seconds[static_cast<size_t>(r - 1)] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - rep_start).count();
    }
  };
  const int n_workers = std::max(1, std::min(config.threads, config.replicates));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  std::vector<identification::CerfEstimate> successful;
  std::vector<int> failed_ids;
  for (int r = 1; r <= config.replicates; ++r) {
    if (ok[static_cast<size_t>(r - 1)]) {
      successful.push_back(std::move(fits[static_cast<size_t>(r - 1)]));
    } else {
      failed_ids.push_back(r);
    }
  }
  if (successful.empty()) {
    std::string detail = failures.empty() ? "" : (": first failure: " + failures.front().second);
    throw NumericalError("every replicate failed" + detail);
  }

  ReplicationReport report =
      aggregate_replications(config.scenario, grid, true_cerf(config.scenario, grid), x_p10,
                             x_p90, config.model.band_levels, successful);
  report.failed_replicates = failed_ids;
  report.replicate_seconds.assign(seconds.begin(), seconds.end());
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace simulation
}  // namespace bnpnc
