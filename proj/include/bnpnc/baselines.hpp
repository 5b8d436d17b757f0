#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bnpnc/dataset.hpp"
#include "bnpnc/gibbs.hpp"
#include "bnpnc/identification.hpp"
#include "bnpnc/standardize.hpp"

namespace bnpnc {
namespace baselines {

// BnpNc   - mixture on [1, x, z, L...] with the negative-control correction;
// Yx      - mixture on [1, x, L...], exposure coefficient taken at face value;
// Yxu     - mixture on [1, x, u, L...], the unmasked-confounder benchmark;
// LinearNc- single closed-form linear estimate (see linear_nc below).
enum class FitMode { BnpNc, Yx, Yxu, LinearNc };

FitMode parse_fit_mode(const std::string& name);  // "bnp-nc", "yx", "yxu", "linear-nc"
std::string fit_mode_name(FitMode mode);

struct FitSpec {
  FitMode mode = FitMode::BnpNc;
  ModelConfig config;
  int chains = 1;
  int threads = 1;
};

struct FitResult {
  FitMode mode = FitMode::BnpNc;
  identification::CerfEstimate cerf;
  std::vector<gibbs::Draw> draws;  // pooled across chains, chain-major
  std::vector<double> chain_seconds;
  Standardization transforms;
  Eigen::Index design_cols = 0;
  Eigen::Index w_design_cols = 0;
  int knot_segments = 0;
  double runtime_seconds = 0.0;
};

// Runs the mixture sampler for modes BnpNc / Yx / Yxu (LinearNc is not a
// chain; use linear_nc). Chains use substreams of (config.seed, chain) and
// their retained draws are pooled in chain order. The exposure-response
// draws come back on the original data scale.
FitResult fit_cerf(const Dataset& data, const FitSpec& spec);

struct LinearNcOptions {
  double tol = 1e-6;
  int bootstrap = 1000;
  double ci_level = 0.95;
  std::uint64_t seed = 20240817;
  bool standardize = true;
};

struct LinearNcEstimate {
  double estimate = 0.0;  // original scale
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double ci_level = 0.95;
  int bootstrap_resamples = 0;
  int bootstrap_failures = 0;
  Eigen::VectorXd theta_y;  // analysis-scale OLS coefficients [1, x, z, L...]
  Eigen::VectorXd theta_w;
  double scale_factor = 1.0;  // sd_y / sd_x applied to the analysis-scale slope
};

// Closed-form linear estimate: OLS of y and of w on [1, x, z, L...], slope
// theta_yx - theta_yz * theta_wx / theta_wz, percentile-bootstrap interval.
LinearNcEstimate linear_nc(const Dataset& data, const LinearNcOptions& options = {});

// Linear partial correlation of a and b given the conditioning columns,
// residualizing both on [1, conditioners].
double partial_correlation(const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b,
                           const Eigen::Ref<const Eigen::MatrixXd>& conditioners);

struct FisherInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Fisher-z interval for a partial correlation with c conditioners; requires
// n >= c + 4.
FisherInterval fisher_ci(double r, Eigen::Index n, Eigen::Index n_conditioners, double level);

struct AssumptionTest {
  std::string assumption;       // "A4".."A7"
  std::string null_hypothesis;  // e.g. "X _||_ W | U"
  double estimate = 0.0;        // partial correlation
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool holds = false;
  std::string conclusion;
};

// Linear partial-correlation checks of the negative-control assumptions,
// each against the hidden/designated confounder column:
//   A4: X _||_ W | U   (holds when the CI covers 0)
//   A5: W _||_ Z | U   (holds when the CI covers 0)
//   A6: W dependent on U      (holds when the CI excludes 0)
//   A7: U dependent on Z | X  (holds when the CI excludes 0)
// Requires a u column; level is two-sided.
std::vector<AssumptionTest> assumption_tests(const Dataset& data, double level = 0.95);

std::string format_assumption_table(const std::vector<AssumptionTest>& tests);

}  // namespace baselines
}  // namespace bnpnc
