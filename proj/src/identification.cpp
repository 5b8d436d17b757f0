#include "bnpnc/identification.hpp"

#include <algorithm>
#include <cmath>

#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"

namespace bnpnc {
namespace identification {

MomentCache MomentCache::from(const Dataset& analysis_scale) {
  MomentCache cache;
  cache.mean_x = analysis_scale.x.mean();
  cache.mean_z = analysis_scale.z.mean();
  cache.covariate_means = analysis_scale.covariates.colwise().mean().transpose();
  return cache;
}

namespace {

double wz_ratio(const Eigen::Ref<const Eigen::VectorXd>& theta_w, double tol) {
  if (theta_w.size() < 3) {
    throw IdentificationError("the W regression must carry [intercept, x, z] coefficients");
  }
  if (std::fabs(theta_w[2]) <= tol) {
    throw IdentificationError(
        "negative-control correction undefined: |theta_WZ| <= tolerance, so W carries no "
        "signal from Z (assumptions A6/A7 fail or nearly fail)");
  }
  return theta_w[1] / theta_w[2];
}

}  // namespace

double component_effect(const Eigen::Ref<const Eigen::RowVectorXd>& theta_y_k,
                        const Eigen::Ref<const Eigen::VectorXd>& theta_w, double tol) {
  const double ratio = wz_ratio(theta_w, tol);
  return theta_y_k[1] - theta_y_k[2] * ratio;
}

double component_intercept(const Eigen::Ref<const Eigen::RowVectorXd>& theta_y_k,
                           const Eigen::Ref<const Eigen::VectorXd>& theta_w,
                           const MomentCache& moments, double tol) {
  const double ratio = wz_ratio(theta_w, tol);
  double value = theta_y_k[0] + theta_y_k[2] * moments.mean_z +
                 theta_y_k[2] * ratio * moments.mean_x;
  for (Eigen::Index j = 0; j < moments.covariate_means.size(); ++j) {
    value += theta_y_k[3 + j] * moments.covariate_means[j];
  }
  return value;
}

Eigen::VectorXd cerf_draw(const gibbs::Draw& draw, const Eigen::Ref<const Eigen::VectorXd>& grid,
                          const psbp::KnotGrid& knots, const MomentCache& moments, double tol) {
  const Eigen::Index K = draw.theta_y.rows();
  Eigen::VectorXd effect(K);
  Eigen::VectorXd intercept(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    effect[k] = component_effect(draw.theta_y.row(k), draw.theta_w, tol);
    intercept[k] = component_intercept(draw.theta_y.row(k), draw.theta_w, moments, tol);
  }
  Eigen::VectorXd values(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    const Eigen::VectorXd weights = psbp::weights_at(x, draw.eta, knots);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      acc += weights[k] * (effect[k] * x + intercept[k]);
    }
    values[g] = acc;
  }
  return values;
}

Eigen::VectorXd mixture_regression_curve(const gibbs::Draw& draw,
                                         const Eigen::Ref<const Eigen::VectorXd>& grid,
                                         const psbp::KnotGrid& knots,
                                         const Eigen::Ref<const Eigen::VectorXd>& extra_means) {
  const Eigen::Index K = draw.theta_y.rows();
  if (draw.theta_y.cols() != 2 + extra_means.size()) {
    throw NumericalError("extra_means does not match the design width");
  }
  Eigen::VectorXd level(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double base = draw.theta_y(k, 0);
    for (Eigen::Index j = 0; j < extra_means.size(); ++j) {
      base += draw.theta_y(k, 2 + j) * extra_means[j];
    }
    level[k] = base;
  }
  Eigen::VectorXd values(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    const Eigen::VectorXd weights = psbp::weights_at(x, draw.eta, knots);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      acc += weights[k] * (draw.theta_y(k, 1) * x + level[k]);
    }
    values[g] = acc;
  }
  return values;
}

CerfBands summarize(const Eigen::Ref<const Eigen::MatrixXd>& draws, std::vector<double> levels) {
  if (draws.rows() < 2) {
    throw NumericalError("band summary needs at least 2 retained draws");
  }
  std::sort(levels.begin(), levels.end());
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ConfigError("credible levels must lie strictly in (0,1)");
    }
  }
  const Eigen::Index G = draws.cols();
  const auto L = static_cast<Eigen::Index>(levels.size());
  CerfBands bands;
  bands.levels = levels;
  bands.median.resize(G);
  bands.lower.resize(L, G);
  bands.upper.resize(L, G);
  for (Eigen::Index g = 0; g < G; ++g) {
    const Eigen::VectorXd sorted = sorted_copy(draws.col(g));
    bands.median[g] = quantile_type7_sorted(sorted, 0.5);
    for (Eigen::Index l = 0; l < L; ++l) {
      const double tail = 0.5 * (1.0 - levels[static_cast<size_t>(l)]);
      bands.lower(l, g) = quantile_type7_sorted(sorted, tail);
      bands.upper(l, g) = quantile_type7_sorted(sorted, 1.0 - tail);
    }
  }
  return bands;
}

}  // namespace identification
}  // namespace bnpnc
