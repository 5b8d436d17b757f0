#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnpnc/conjugate.hpp"
#include "bnpnc/rng.hpp"
#include "test_support.hpp"

using namespace bnpnc;

namespace {

Eigen::MatrixXd random_design(RngStream& rng, Eigen::Index n, Eigen::Index d) {
  Eigen::MatrixXd design(n, d);
  design.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 1; j < d; ++j) {
      design(i, j) = rng.normal();
    }
  }
  return design;
}

}  // namespace

TEST_CASE("empty data leaves the prior untouched") {
  const auto prior = GaussianInverseGammaPrior::weakly_informative(3, 100.0, 1.5, 2.5);
  const Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::VectorXd xty = Eigen::VectorXd::Zero(3);
  const auto post = conjugate::nig_posterior(prior, xtx, xty, 0.0, 0);
  CHECK((post.mean - prior.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK(post.shape == 1.5);
  CHECK(post.scale == 2.5);
  // posterior covariance must reconstruct the prior covariance
  const Eigen::MatrixXd cov = post.precision_llt.solve(Eigen::MatrixXd::Identity(3, 3));
  CHECK((cov - prior.covariance).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("flat prior posterior mean approaches the OLS solution") {
  RngStream rng(42);
  const Eigen::Index n = 4000;
  const Eigen::MatrixXd design = random_design(rng, n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = 1.0 + 2.0 * design(i, 1) - 0.5 * design(i, 2) + rng.normal(0.0, 0.3);
  }
  const auto prior = GaussianInverseGammaPrior::weakly_informative(3, 1e8);
  const auto post = conjugate::nig_posterior(prior, design, y);
  const Eigen::VectorXd ls = testsup::ols_oracle(design, y);
  CHECK((post.mean - ls).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("point-mass prior pins the coefficients at the prior mean") {
  RngStream rng(43);
  const Eigen::Index n = 100;
  const Eigen::MatrixXd design = random_design(rng, n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = 3.0 * design(i, 1) + rng.normal();
  }
  GaussianInverseGammaPrior prior = GaussianInverseGammaPrior::weakly_informative(2, 1e-16);
  prior.mean << -1.0, 7.0;
  const auto post = conjugate::nig_posterior(prior, design, y);
  for (int rep = 0; rep < 50; ++rep) {
    const auto [theta, sigma2] = conjugate::draw_nig(post, rng);
    CHECK(sigma2 > 0.0);
    CHECK((theta - prior.mean).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("posterior scale stays positive and grows with misfit") {
  RngStream rng(44);
  const Eigen::MatrixXd design = random_design(rng, 50, 2);
  Eigen::VectorXd y(50);
  for (Eigen::Index i = 0; i < 50; ++i) {
    y[i] = design(i, 1) + rng.normal();
  }
  const auto prior = GaussianInverseGammaPrior::weakly_informative(2);
  const auto post = conjugate::nig_posterior(prior, design, y);
  CHECK(post.scale > prior.scale);
  CHECK(post.shape == doctest::Approx(prior.shape + 25.0));
  const auto worse = conjugate::nig_posterior(prior, design, 10.0 * y);
  CHECK(worse.scale > post.scale);
}

TEST_CASE("fixed-variance coefficient draws match the analytic posterior") {
  RngStream rng(45);
  const Eigen::Index n = 200;
  const Eigen::MatrixXd design = random_design(rng, n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = 0.5 + 1.5 * design(i, 1) + rng.normal(0.0, 0.7);
  }
  const auto prior = GaussianInverseGammaPrior::weakly_informative(2, 100.0);
  const auto post = conjugate::nig_posterior(prior, design, y);
  const double sigma2 = 0.49;

  // independent route to the analytic marginal of the slope
  const Eigen::MatrixXd precision =
      prior.covariance.fullPivLu().inverse() + design.transpose() * design;
  const Eigen::MatrixXd cov = sigma2 * precision.fullPivLu().inverse();
  const Eigen::VectorXd mean = precision.fullPivLu().solve(design.transpose() * y);

  const int m = 20000;
  std::vector<double> slope(m);
  for (int i = 0; i < m; ++i) {
    slope[static_cast<size_t>(i)] = conjugate::draw_coefficients_given_sigma(post, sigma2, rng)[1];
  }
  const double se = std::sqrt(cov(1, 1) / m);
  CHECK(std::fabs(testsup::mean_of(slope) - mean[1]) < 3 * se);
  CHECK(std::fabs(testsup::sd_of(slope) - std::sqrt(cov(1, 1))) < 3 * std::sqrt(cov(1, 1) / (2.0 * m)));
}

TEST_CASE("unit-noise posterior with no data is the prior") {
  const Eigen::VectorXd prior_mean = Eigen::VectorXd::Constant(4, 0.3);
  const auto post = conjugate::unit_noise_posterior(prior_mean, Eigen::MatrixXd::Zero(4, 4),
                                                    Eigen::VectorXd::Zero(4));
  CHECK((post.mean - prior_mean).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd cov = post.precision_llt.solve(Eigen::MatrixXd::Identity(4, 4));
  CHECK((cov - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}
