#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bnpnc/dataset.hpp"
#include "bnpnc/gibbs.hpp"
#include "bnpnc/psbp.hpp"

namespace bnpnc {
namespace identification {

// Sample moments of the analysis-scale regressors that enter the intercept
// correction. covariate_means aligns with design columns 3.. of the
// negative-control layout [1, x, z, covariates...].
struct MomentCache {
  double mean_x = 0.0;
  double mean_z = 0.0;
  Eigen::VectorXd covariate_means;

  static MomentCache from(const Dataset& analysis_scale);
};

// Causal slope of component k: theta_xk - theta_zk * (theta_wx / theta_wz).
// theta_y_k layout [intercept, x, z, ...]; theta_w layout [intercept, x, z, ...].
// Throws IdentificationError when |theta_wz| <= tol (assumptions A6/A7).
double component_effect(const Eigen::Ref<const Eigen::RowVectorXd>& theta_y_k,
                        const Eigen::Ref<const Eigen::VectorXd>& theta_w, double tol);

// Component intercept after the negative-control correction:
//   theta_0k + theta_zk * E[z] + theta_zk * (theta_wx/theta_wz) * E[x]
// plus the covariate terms evaluated at their means.
double component_intercept(const Eigen::Ref<const Eigen::RowVectorXd>& theta_y_k,
                           const Eigen::Ref<const Eigen::VectorXd>& theta_w,
                           const MomentCache& moments, double tol);

// Exposure-response values of one retained draw over `grid` (analysis
// scale): sum_k weight_k(x) * (effect_k * x + intercept_k).
Eigen::VectorXd cerf_draw(const gibbs::Draw& draw, const Eigen::Ref<const Eigen::VectorXd>& grid,
                          const psbp::KnotGrid& knots, const MomentCache& moments, double tol);

// Uncorrected mixture regression curve, used by the comparison fits: the
// exposure coefficient is taken at face value and every remaining design
// column is plugged in at its sample mean (extra_means aligns with design
// columns 2..).
Eigen::VectorXd mixture_regression_curve(const gibbs::Draw& draw,
                                         const Eigen::Ref<const Eigen::VectorXd>& grid,
                                         const psbp::KnotGrid& knots,
                                         const Eigen::Ref<const Eigen::VectorXd>& extra_means);

// Pointwise median and symmetric credible intervals, type-7 quantiles
// across draws. lower/upper rows align with ascending `levels`.
struct CerfBands {
  std::vector<double> levels;
  Eigen::VectorXd median;
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
};

CerfBands summarize(const Eigen::Ref<const Eigen::MatrixXd>& draws, std::vector<double> levels);

// A fit's final product: grid on the original exposure scale, per-draw curve
// evaluations on the original outcome scale, and their band summary.
struct CerfEstimate {
  Eigen::VectorXd grid;
  Eigen::MatrixXd draws;
  CerfBands bands;
  int identification_failures = 0;
  int total_draws = 0;
};

}  // namespace identification
}  // namespace bnpnc
