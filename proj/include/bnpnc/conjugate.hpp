#pragma once

#include <Eigen/Dense>
#include <utility>

#include "bnpnc/dataset.hpp"
#include "bnpnc/rng.hpp"

namespace bnpnc {
namespace conjugate {

// Normal-inverse-gamma posterior for a Gaussian linear regression,
//   theta | sigma^2 ~ N(mean, sigma^2 * precision^-1),
//   sigma^2 ~ IG(shape, scale),
// held in precision (Cholesky) form.
struct NigPosterior {
  Eigen::LLT<Eigen::MatrixXd> precision_llt;
  Eigen::VectorXd mean;
  double shape = 1.0;
  double scale = 1.0;
};

// Full-conditional from sufficient statistics (X'X, X'y, y'y, n); with n = 0
// the posterior equals the prior exactly.
NigPosterior nig_posterior(const GaussianInverseGammaPrior& prior, const Eigen::MatrixXd& xtx,
                           const Eigen::VectorXd& xty, double yty, Eigen::Index n_rows);

NigPosterior nig_posterior(const GaussianInverseGammaPrior& prior, const Eigen::MatrixXd& design,
                           const Eigen::VectorXd& response);

// Joint draw: sigma^2 from its inverse gamma, then theta | sigma^2.
std::pair<Eigen::VectorXd, double> draw_nig(const NigPosterior& posterior, RngStream& rng);

// theta | sigma^2 alone (used by the fixed-variance validity checks).
Eigen::VectorXd draw_coefficients_given_sigma(const NigPosterior& posterior, double sigma2,
                                              RngStream& rng);

// Gaussian posterior for a regression with known unit observation variance
// and independent N(prior_mean_j, 1) coefficient priors:
//   precision = I + X'X,  mean = precision^-1 (prior_mean + X'q).
struct GaussianPosterior {
  Eigen::LLT<Eigen::MatrixXd> precision_llt;
  Eigen::VectorXd mean;
};

GaussianPosterior unit_noise_posterior(const Eigen::VectorXd& prior_mean,
                                       const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xtq);

Eigen::VectorXd draw_gaussian(const GaussianPosterior& posterior, RngStream& rng);

}  // namespace conjugate
}  // namespace bnpnc
