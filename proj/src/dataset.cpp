#include "bnpnc/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"

namespace bnpnc {

namespace {

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const std::string& name) {
  if (!v.allFinite()) {
    throw ValidationError("column '" + name + "' contains non-finite values");
  }
}

}  // namespace

void validate(const Dataset& data) {
  const Eigen::Index n = data.n();
  if (n < 1) {
    throw ValidationError("dataset is empty");
  }
  if (data.x.size() != n || data.z.size() != n || data.w.size() != n) {
    throw ValidationError("columns y, x, z, w have mismatched lengths");
  }
  if (data.covariates.size() > 0 && data.covariates.rows() != n) {
    throw ValidationError("covariate rows do not match n");
  }
  if (data.has_u() && data.u_hidden.size() != n) {
    throw ValidationError("u column length does not match n");
  }
  if (static_cast<Eigen::Index>(data.covariate_names.size()) != data.n_covariates()) {
    throw ValidationError("covariate name count does not match covariate columns");
  }
  require_finite(data.y, "y");
  require_finite(data.x, "x");
  require_finite(data.z, "z");
  require_finite(data.w, "w");
  for (Eigen::Index j = 0; j < data.n_covariates(); ++j) {
    require_finite(data.covariates.col(j), data.covariate_names[static_cast<size_t>(j)]);
  }
  if (data.has_u()) {
    require_finite(data.u_hidden, "u");
  }
  if (count_distinct(data.x) < 2) {
    throw ValidationError(
        "exposure x is constant: quantile cutpoints are undefined with fewer "
        "than 2 distinct values");
  }
}

GaussianInverseGammaPrior GaussianInverseGammaPrior::weakly_informative(Eigen::Index dim,
                                                                        double variance,
                                                                        double shape,
                                                                        double scale) {
  GaussianInverseGammaPrior prior;
  prior.mean = Eigen::VectorXd::Zero(dim);
  prior.covariance = variance * Eigen::MatrixXd::Identity(dim, dim);
  prior.shape = shape;
  prior.scale = scale;
  return prior;
}

void GaussianInverseGammaPrior::validate() const {
  if (mean.size() != covariance.rows() || covariance.rows() != covariance.cols()) {
    throw ConfigError("prior mean/covariance dimensions disagree");
  }
  if (!covariance.isApprox(covariance.transpose(), 1e-12)) {
    throw ConfigError("prior covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("prior covariance is not positive definite");
  }
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ConfigError("inverse-gamma shape and scale must be positive");
  }
}

GaussianInverseGammaPrior PriorSpec::y_prior(Eigen::Index dim) const {
  if (explicit_y) {
    if (explicit_y->mean.size() != dim) {
      throw ConfigError("explicit y prior dimension does not match the design");
    }
    explicit_y->validate();
    return *explicit_y;
  }
  return GaussianInverseGammaPrior::weakly_informative(dim, v0_scale_y, a0_y, b0_y);
}

GaussianInverseGammaPrior PriorSpec::w_prior(Eigen::Index dim) const {
  if (explicit_w) {
    if (explicit_w->mean.size() != dim) {
      throw ConfigError("explicit w prior dimension does not match the design");
    }
    explicit_w->validate();
    return *explicit_w;
  }
  return GaussianInverseGammaPrior::weakly_informative(dim, v0_scale_w, a0_w, b0_w);
}

Eigen::VectorXd make_grid(const CerfGridSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!spec.explicit_points.empty()) {
    Eigen::VectorXd grid(static_cast<Eigen::Index>(spec.explicit_points.size()));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      grid[i] = spec.explicit_points[static_cast<size_t>(i)];
    }
    if (grid.size() > 1) {
      for (Eigen::Index i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
          throw ConfigError("explicit grid points must be strictly ascending");
        }
      }
    }
    return grid;
  }
  if (spec.points < 1) {
    throw ConfigError("grid needs at least one point");
  }
  if (!(spec.lower_pct >= 0.0 && spec.lower_pct < spec.upper_pct && spec.upper_pct <= 1.0)) {
    throw ConfigError("grid percentile bounds must satisfy 0 <= lower < upper <= 1");
  }
  const Eigen::VectorXd sorted = sorted_copy(x);
  const double lo = quantile_type7_sorted(sorted, spec.lower_pct);
  const double hi = quantile_type7_sorted(sorted, spec.upper_pct);
  if (!(hi > lo)) {
    throw ValidationError("degenerate exposure distribution: grid endpoints coincide");
  }
  Eigen::VectorXd grid(spec.points);
  if (spec.points == 1) {
    grid[0] = 0.5 * (lo + hi);
    return grid;
  }
  const double step = (hi - lo) / static_cast<double>(spec.points - 1);
  for (int i = 0; i < spec.points; ++i) {
    grid[i] = lo + step * static_cast<double>(i);
  }
  return grid;
}

void ModelConfig::validate(Eigen::Index n) const {
  if (truncation < 1) {
    throw ConfigError("truncation level K must be >= 1");
  }
  if (n_knots < 1) {
    throw ConfigError("n_knots must be >= 1");
  }
  if (iterations < 1 || burn_in < 0 || burn_in >= iterations) {
    throw ConfigError("need 0 <= burn_in < iterations");
  }
  if (thinning < 1) {
    throw ConfigError("thinning must be >= 1");
  }
  if (!(identification_tol > 0.0)) {
    throw ConfigError("identification tolerance must be positive");
  }
  if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0)) {
    throw ConfigError("max_failure_rate must lie in [0,1]");
  }
  if (band_levels.empty()) {
    throw ConfigError("at least one credible level is required");
  }
  for (double level : band_levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ConfigError("credible levels must lie strictly in (0,1)");
    }
  }
  if (n >= 0 && n_knots > n / 10) {
    throw ConfigError("n_knots too large for the sample: each weight-model segment needs data (n_knots <= n/10)");
  }
}

}  // namespace bnpnc
