#include "bnpnc/conjugate.hpp"

#include <cmath>

#include "bnpnc/errors.hpp"

namespace bnpnc {
namespace conjugate {

NigPosterior nig_posterior(const GaussianInverseGammaPrior& prior, const Eigen::MatrixXd& xtx,
                           const Eigen::VectorXd& xty, double yty, Eigen::Index n_rows) {
  const Eigen::Index d = prior.mean.size();
  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.covariance);
  if (prior_llt.info() != Eigen::Success) {
    throw NumericalError("prior covariance is not positive definite");
  }
  const Eigen::MatrixXd prior_precision =
      prior_llt.solve(Eigen::MatrixXd::Identity(d, d));

  NigPosterior post;
  const Eigen::MatrixXd precision = prior_precision + xtx;
  post.precision_llt.compute(precision);
  if (post.precision_llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }
  const Eigen::VectorXd rhs = prior_precision * prior.mean + xty;
  post.mean = post.precision_llt.solve(rhs);
  post.shape = prior.shape + 0.5 * static_cast<double>(n_rows);
  // Stable residual form of b_n = b0 + (y'y + m0'P0 m0 - m_n'P_n m_n)/2:
  // both summands below are nonnegative.
  const double fit_residual =
      yty - 2.0 * post.mean.dot(xty) + post.mean.dot(xtx * post.mean);
  const Eigen::VectorXd shift = post.mean - prior.mean;
  const double prior_residual = shift.dot(prior_precision * shift);
  post.scale = prior.scale + 0.5 * (std::max(fit_residual, 0.0) + std::max(prior_residual, 0.0));
  return post;
}

NigPosterior nig_posterior(const GaussianInverseGammaPrior& prior, const Eigen::MatrixXd& design,
                           const Eigen::VectorXd& response) {
  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::VectorXd xty = design.transpose() * response;
  return nig_posterior(prior, xtx, xty, response.squaredNorm(), design.rows());
}

std::pair<Eigen::VectorXd, double> draw_nig(const NigPosterior& posterior, RngStream& rng) {
  const double sigma2 = rng.inv_gamma(posterior.shape, posterior.scale);
  return {draw_coefficients_given_sigma(posterior, sigma2, rng), sigma2};
}

Eigen::VectorXd draw_coefficients_given_sigma(const NigPosterior& posterior, double sigma2,
                                              RngStream& rng) {
  const Eigen::Index d = posterior.mean.size();
  Eigen::VectorXd noise(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    noise[j] = rng.normal();
  }
  // Cov = sigma^2 P^-1 = sigma^2 L^-T L^-1 with P = L L'.
  const Eigen::VectorXd scaled =
      posterior.precision_llt.matrixU().solve(noise) * std::sqrt(sigma2);
  return posterior.mean + scaled;
}

GaussianPosterior unit_noise_posterior(const Eigen::VectorXd& prior_mean,
                                       const Eigen::MatrixXd& xtx, const Eigen::VectorXd& xtq) {
  const Eigen::Index d = prior_mean.size();
  GaussianPosterior post;
  const Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(d, d) + xtx;
  post.precision_llt.compute(precision);
  if (post.precision_llt.info() != Eigen::Success) {
    throw NumericalError("weight-model posterior precision is not positive definite");
  }
  post.mean = post.precision_llt.solve(prior_mean + xtq);
  return post;
}

Eigen::VectorXd draw_gaussian(const GaussianPosterior& posterior, RngStream& rng) {
  const Eigen::Index d = posterior.mean.size();
  Eigen::VectorXd noise(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    noise[j] = rng.normal();
  }
  return posterior.mean + posterior.precision_llt.matrixU().solve(noise);
}

}  // namespace conjugate
}  // namespace bnpnc
