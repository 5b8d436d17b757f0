#include "bnpnc/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"
#include "bnpnc/rng.hpp"

namespace bnpnc {
namespace baselines {

FitMode parse_fit_mode(const std::string& name) {
  if (name == "bnp-nc") return FitMode::BnpNc;
  if (name == "yx") return FitMode::Yx;
  if (name == "yxu") return FitMode::Yxu;
  if (name == "linear-nc") return FitMode::LinearNc;
  throw ConfigError("unknown fit mode '" + name + "' (expected bnp-nc, yx, yxu, or linear-nc)");
}

std::string fit_mode_name(FitMode mode) {
  switch (mode) {
    case FitMode::BnpNc: return "bnp-nc";
    case FitMode::Yx: return "yx";
    case FitMode::Yxu: return "yxu";
    case FitMode::LinearNc: return "linear-nc";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd nc_design(const Dataset& d) {
  Eigen::MatrixXd design(d.n(), 3 + d.n_covariates());
  design.col(0).setOnes();
  design.col(1) = d.x;
  design.col(2) = d.z;
  design.rightCols(d.n_covariates()) = d.covariates;
  return design;
}

Eigen::MatrixXd yx_design(const Dataset& d) {
  Eigen::MatrixXd design(d.n(), 2 + d.n_covariates());
  design.col(0).setOnes();
  design.col(1) = d.x;
  design.rightCols(d.n_covariates()) = d.covariates;
  return design;
}

Eigen::MatrixXd yxu_design(const Dataset& d) {
  Eigen::MatrixXd design(d.n(), 3 + d.n_covariates());
  design.col(0).setOnes();
  design.col(1) = d.x;
  design.col(2) = d.u_hidden;
  design.rightCols(d.n_covariates()) = d.covariates;
  return design;
}

}  // namespace

FitResult fit_cerf(const Dataset& data, const FitSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (spec.mode == FitMode::LinearNc) {
    throw ConfigError("linear-nc is a closed-form estimate; use linear_nc()");
  }
  if (spec.chains < 1) {
    throw ConfigError("at least one chain is required");
  }
  validate(data);
  const ModelConfig& config = spec.config;
  config.validate(data.n());
  if (spec.mode == FitMode::Yxu && !data.has_u()) {
    throw ConfigError("mode yxu needs a designated confounder column u");
  }

  const StandardizedData std_data =
      config.standardize ? standardize(data) : no_standardize(data);
  const Dataset& analysis = std_data.data;

  gibbs::MixtureProblem problem{
      Eigen::MatrixXd(), analysis.y, analysis.x,
      psbp::make_knots(analysis.x, config.n_knots),
      false, Eigen::MatrixXd(), Eigen::VectorXd()};
  switch (spec.mode) {
    case FitMode::BnpNc:
      problem.design = nc_design(analysis);
      problem.with_w = true;
      problem.w_design = nc_design(analysis);
      problem.w_response = analysis.w;
      break;
    case FitMode::Yx:
      problem.design = yx_design(analysis);
      break;
    case FitMode::Yxu:
      problem.design = yxu_design(analysis);
      break;
    case FitMode::LinearNc:
      break;
  }

  // The grid lives on the original exposure scale; chains evaluate on the
  // analysis scale and results map back through the y transform.
  const Eigen::VectorXd grid_original = make_grid(config.grid, data.x);
  const Eigen::VectorXd grid_analysis = std_data.transforms.x.apply(grid_original);
  const AffineTransform y_transform = std_data.transforms.y;

  gibbs::DrawHook hook;
  if (spec.mode == FitMode::BnpNc) {
    const auto moments = identification::MomentCache::from(analysis);
    const double tol = config.identification_tol;
    const auto knots = problem.knots;
    hook = [grid_analysis, knots, moments, tol, y_transform](
               const gibbs::Draw& draw) -> std::optional<Eigen::VectorXd> {
      try {
        return y_transform.invert(
            identification::cerf_draw(draw, grid_analysis, knots, moments, tol));
      } catch (const IdentificationError&) {
        return std::nullopt;
      }
    };
  } else {
    Eigen::VectorXd extra_means =
        problem.design.rightCols(problem.design.cols() - 2).colwise().mean().transpose();
    const auto knots = problem.knots;
    hook = [grid_analysis, knots, extra_means, y_transform](
               const gibbs::Draw& draw) -> std::optional<Eigen::VectorXd> {
      return y_transform.invert(
          identification::mixture_regression_curve(draw, grid_analysis, knots, extra_means));
    };
  }

  std::vector<gibbs::ChainOutput> chains(static_cast<size_t>(spec.chains));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= spec.chains || failed.load()) {
        return;
      }
      try {
        RngStream rng = RngStream::derive(config.seed, {static_cast<std::uint64_t>(c)});
        chains[static_cast<size_t>(c)] =
            gibbs::run_chain(problem, config, rng, hook, grid_analysis.size());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = std::string("chain ") + std::to_string(c + 1) + ": " + e.what();
        failed.store(true);
      }
    }
  };
  const int n_workers = std::max(1, std::min(spec.threads, spec.chains));
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
  if (failed.load()) {
    throw NumericalError("fit failed: " + failure);
  }

  FitResult result;
  result.mode = spec.mode;
  result.transforms = std_data.transforms;
  result.design_cols = problem.design.cols();
  result.w_design_cols = problem.with_w ? problem.w_design.cols() : 0;
  result.knot_segments = problem.knots.segments();

  int total_rows = 0;
  int total_failures = 0;
  for (const auto& chain : chains) {
    total_rows += static_cast<int>(chain.retained.size());
    total_failures += static_cast<int>(chain.cerf_failed.size());
    result.chain_seconds.push_back(chain.meta.runtime_seconds);
  }
  result.cerf.total_draws = total_rows;
  result.cerf.identification_failures = total_failures;
  if (total_rows > 0 &&
      static_cast<double>(total_failures) > config.max_failure_rate * total_rows) {
    std::ostringstream msg;
    msg << "identification failed for " << total_failures << " of " << total_rows
        << " retained draws (> " << 100.0 * config.max_failure_rate
        << "%): the posterior puts mass on |theta_WZ| <= " << config.identification_tol
        << "; assumptions A6/A7 look violated for these data";
    throw IdentificationError(msg.str());
  }

  result.cerf.grid = grid_original;
  result.cerf.draws.resize(total_rows - total_failures, grid_original.size());
  Eigen::Index row = 0;
  for (auto& chain : chains) {
    std::vector<bool> chain_failed(chain.retained.size(), false);
    for (Eigen::Index idx : chain.cerf_failed) {
      chain_failed[static_cast<size_t>(idx)] = true;
    }
    for (size_t r = 0; r < chain.retained.size(); ++r) {
      if (!chain_failed[r]) {
        result.cerf.draws.row(row++) = chain.cerf.row(static_cast<Eigen::Index>(r));
      }
      result.draws.push_back(std::move(chain.retained[r]));
    }
  }
  result.cerf.bands = identification::summarize(result.cerf.draws, config.band_levels);
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

Eigen::VectorXd ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  return design.colPivHouseholderQr().solve(response);
}

double nc_slope_from_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, double tol, Eigen::VectorXd* theta_y_out,
                         Eigen::VectorXd* theta_w_out) {
  const Eigen::VectorXd theta_y = ols(design, y);
  const Eigen::VectorXd theta_w = ols(design, w);
  if (theta_y_out) *theta_y_out = theta_y;
  if (theta_w_out) *theta_w_out = theta_w;
  return identification::component_effect(theta_y.transpose(), theta_w, tol);
}

}  // namespace

LinearNcEstimate linear_nc(const Dataset& data, const LinearNcOptions& options) {
  validate(data);
  if (options.bootstrap < 0) {
    throw ConfigError("bootstrap resample count cannot be negative");
  }
  const StandardizedData std_data =
      options.standardize ? standardize(data) : no_standardize(data);
  const Dataset& analysis = std_data.data;
  const Eigen::MatrixXd design = nc_design(analysis);
  const double scale_factor = std_data.transforms.y.scale / std_data.transforms.x.scale;

  LinearNcEstimate out;
  out.ci_level = options.ci_level;
  out.scale_factor = scale_factor;
  const double slope = nc_slope_from_ols(design, analysis.y, analysis.w, options.tol,
                                         &out.theta_y, &out.theta_w);
  out.estimate = slope * scale_factor;

  const Eigen::Index n = analysis.n();
  RngStream rng = RngStream::derive(options.seed, {0xb007u});
  std::vector<double> resampled;
  resampled.reserve(static_cast<size_t>(options.bootstrap));
  Eigen::MatrixXd boot_design(n, design.cols());
  Eigen::VectorXd boot_y(n), boot_w(n);
  for (int b = 0; b < options.bootstrap; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto j = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(rng.uniform() * n));
      boot_design.row(i) = design.row(j);
      boot_y[i] = analysis.y[j];
      boot_w[i] = analysis.w[j];
    }
    try {
      resampled.push_back(
          nc_slope_from_ols(boot_design, boot_y, boot_w, options.tol, nullptr, nullptr) *
          scale_factor);
    } catch (const IdentificationError&) {
      ++out.bootstrap_failures;
    }
  }
  out.bootstrap_resamples = static_cast<int>(resampled.size());
  if (out.bootstrap_resamples >= 2) {
    Eigen::Map<Eigen::VectorXd> values(resampled.data(),
                                       static_cast<Eigen::Index>(resampled.size()));
    const Eigen::VectorXd sorted = sorted_copy(values);
    const double tail = 0.5 * (1.0 - options.ci_level);
    out.ci_lower = quantile_type7_sorted(sorted, tail);
    out.ci_upper = quantile_type7_sorted(sorted, 1.0 - tail);
  } else {
    out.ci_lower = out.ci_upper = out.estimate;
  }
  return out;
}

double partial_correlation(const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b,
                           const Eigen::Ref<const Eigen::MatrixXd>& conditioners) {
  const Eigen::Index n = a.size();
  if (b.size() != n || (conditioners.size() > 0 && conditioners.rows() != n)) {
    throw ValidationError("partial correlation inputs have mismatched lengths");
  }
  const Eigen::Index c = conditioners.cols();
  if (n <= c + 3) {
    throw ValidationError("insufficient rows for a partial correlation with " +
                          std::to_string(c) + " conditioners (need n > conditioners + 3)");
  }
  Eigen::MatrixXd design(n, 1 + c);
  design.col(0).setOnes();
  if (c > 0) {
    design.rightCols(c) = conditioners;
  }
  const auto qr = design.colPivHouseholderQr();
  const Eigen::VectorXd res_a = a - design * qr.solve(a);
  const Eigen::VectorXd res_b = b - design * qr.solve(b);
  const double denom = std::sqrt(res_a.squaredNorm() * res_b.squaredNorm());
  if (!(denom > 0.0)) {
    throw NumericalError("degenerate residuals in partial correlation");
  }
  return res_a.dot(res_b) / denom;
}

FisherInterval fisher_ci(double r, Eigen::Index n, Eigen::Index n_conditioners, double level) {
  if (n <= n_conditioners + 3) {
    throw ValidationError("insufficient rows for a Fisher-z interval");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("confidence level must lie strictly in (0,1)");
  }
  const double clamped = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
  const double z = std::atanh(clamped);
  const double half = norm_quantile(0.5 * (1.0 + level)) /
                      std::sqrt(static_cast<double>(n - n_conditioners - 3));
  return {std::tanh(z - half), std::tanh(z + half)};
}

namespace {

AssumptionTest run_test(const std::string& name, const std::string& null_hypothesis,
                        bool dependence_expected, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b, const Eigen::MatrixXd& conditioners,
                        double level) {
  AssumptionTest t;
  t.assumption = name;
  t.null_hypothesis = null_hypothesis;
  t.estimate = partial_correlation(a, b, conditioners);
  const auto ci = fisher_ci(t.estimate, a.size(), conditioners.cols(), level);
  t.ci_lower = ci.lower;
  t.ci_upper = ci.upper;
  const bool excludes_zero = ci.lower > 0.0 || ci.upper < 0.0;
  t.holds = dependence_expected ? excludes_zero : !excludes_zero;
  t.conclusion = t.assumption + (t.holds ? " holds" : " violated");
  return t;
}

}  // namespace

std::vector<AssumptionTest> assumption_tests(const Dataset& data, double level) {
  validate(data);
  if (!data.has_u()) {
    throw ConfigError(
        "assumption tests A4-A7 need the confounder column: pass --u-col (all four rows "
        "condition on or correlate with U)");
  }
  const Eigen::Index n = data.n();
  const Eigen::MatrixXd u_cond = data.u_hidden;
  const Eigen::MatrixXd x_cond = data.x;
  const Eigen::MatrixXd none(n, 0);

  std::vector<AssumptionTest> tests;
  tests.push_back(run_test("A4", "X _||_ W | U", false, data.x, data.w, u_cond, level));
  tests.push_back(run_test("A5", "W _||_ Z | U", false, data.w, data.z, u_cond, level));
  tests.push_back(run_test("A6", "W _||_ U", true, data.w, data.u_hidden, none, level));
  tests.push_back(run_test("A7", "U _||_ Z | X", true, data.u_hidden, data.z, x_cond, level));
  return tests;
}

std::string format_assumption_table(const std::vector<AssumptionTest>& tests) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "assumption" << std::setw(16) << "null" << std::setw(12)
      << "estimate" << std::setw(22) << "95% CI" << "conclusion\n";
  for (const auto& t : tests) {
    std::ostringstream ci;
    ci << "[" << std::fixed << std::setprecision(4) << t.ci_lower << ", " << t.ci_upper << "]";
    out << std::left << std::setw(12) << t.assumption << std::setw(16) << t.null_hypothesis
        << std::setw(12) << std::fixed << std::setprecision(4) << t.estimate << std::setw(22)
        << ci.str() << t.conclusion << '\n';
  }
  return out.str();
}

}  // namespace baselines
}  // namespace bnpnc
