#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bnpnc {

// One i.i.d. sample: outcome y, continuous exposure x, negative-control
// exposure z, negative-control outcome w, optional measured confounders, and
// (in simulations) the hidden confounder used to generate the data.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd w;
  Eigen::MatrixXd covariates;  // n x p, p == 0 when absent
  std::vector<std::string> covariate_names;
  Eigen::VectorXd u_hidden;  // size 0 when absent

  Eigen::Index n() const { return y.size(); }
  Eigen::Index n_covariates() const { return covariates.cols(); }
  bool has_u() const { return u_hidden.size() > 0; }
};

// Throws ValidationError on length mismatch, non-finite entries, or an
// exposure without at least 2 distinct values.
void validate(const Dataset& data);

// Conjugate prior for one Gaussian regression block:
//   theta | sigma^2 ~ N(mean, sigma^2 * covariance),  sigma^2 ~ IG(shape, scale).
struct GaussianInverseGammaPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double shape = 1.0;
  double scale = 1.0;

  static GaussianInverseGammaPrior weakly_informative(Eigen::Index dim, double variance = 100.0,
                                                      double shape = 1.0, double scale = 1.0);
  void validate() const;
};

// Scalar hyperparameters expanded on demand to whatever design dimension a
// fit mode produces. Explicit prior blocks override the scalar defaults.
struct PriorSpec {
  double v0_scale_y = 100.0;
  double a0_y = 1.0;
  double b0_y = 1.0;
  double v0_scale_w = 100.0;
  double a0_w = 1.0;
  double b0_w = 1.0;
  double mu_eta = 0.0;  // weight-model coefficients are N(mu_eta, 1)
  std::optional<GaussianInverseGammaPrior> explicit_y;
  std::optional<GaussianInverseGammaPrior> explicit_w;

  GaussianInverseGammaPrior y_prior(Eigen::Index dim) const;
  GaussianInverseGammaPrior w_prior(Eigen::Index dim) const;
};

// Where the CERF is evaluated: equally spaced points between two empirical
// percentiles of the observed exposure, unless explicit points are given.
struct CerfGridSpec {
  int points = 100;
  double lower_pct = 0.01;
  double upper_pct = 0.99;
  std::vector<double> explicit_points;  // overrides everything when nonempty
};

Eigen::VectorXd make_grid(const CerfGridSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ModelConfig {
  int truncation = 20;  // K, mixture components kept after truncation
  int n_knots = 4;      // V, weight-model segments
  int iterations = 4000;
  int burn_in = 2000;
  int thinning = 2;
  std::uint64_t seed = 20240817;
  bool standardize = true;
  double identification_tol = 1e-6;  // |theta_WZ| floor, analysis scale
  double max_failure_rate = 0.01;    // abort above this share of failed draws
  std::vector<double> band_levels = {0.5, 0.8, 0.9, 0.95};
  PriorSpec priors;
  CerfGridSpec grid;

  int retained() const { return (iterations - burn_in) / thinning; }
  // n-independent checks always run; pass n >= 0 to also enforce the
  // knots-per-observation bound.
  void validate(Eigen::Index n = -1) const;
};

}  // namespace bnpnc
