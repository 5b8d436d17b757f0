#include "bnpnc/gibbs.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"

namespace bnpnc {
namespace gibbs {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

Sampler::Sampler(const MixtureProblem& problem, const ModelConfig& config, RngStream rng)
    : problem_(problem),
      K_(config.truncation),
      y_prior_(config.priors.y_prior(problem.design.cols())),
      w_prior_(problem.with_w ? config.priors.w_prior(problem.w_design.cols())
                              : GaussianInverseGammaPrior::weakly_informative(0)),
      mu_eta_(config.priors.mu_eta),
      rng_(rng) {
  const Eigen::Index n = problem_.n();
  if (problem_.design.rows() != n || problem_.exposure.size() != n) {
    throw ValidationError("mixture problem dimensions disagree");
  }
  if (problem_.with_w && (problem_.w_design.rows() != n || problem_.w_response.size() != n)) {
    throw ValidationError("W-model dimensions disagree");
  }
  y_prior_.validate();
  if (problem_.with_w) {
    w_prior_.validate();
    w_xtx_ = problem_.w_design.transpose() * problem_.w_design;
    w_xty_ = problem_.w_design.transpose() * problem_.w_response;
    w_yty_ = problem_.w_response.squaredNorm();
  }
  segment_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    segment_[i] = problem_.knots.segment_of(problem_.exposure[i]);
  }
  init_state();
}

void Sampler::init_state() {
  const Eigen::Index n = problem_.n();
  const Eigen::Index d = problem_.design.cols();
  const int V = problem_.knots.segments();

  state_.theta_y = Eigen::MatrixXd::Zero(K_, d);
  state_.sigma_y = Eigen::VectorXd::Ones(K_);
  if (problem_.with_w) {
    state_.theta_w = Eigen::VectorXd::Zero(problem_.w_design.cols());
    state_.sigma_w = 1.0;
  }
  state_.eta.resize(K_, 1 + V);
  for (Eigen::Index k = 0; k < K_; ++k) {
    for (Eigen::Index v = 0; v <= V; ++v) {
      state_.eta(k, v) = rng_.normal(mu_eta_, 1.0);
    }
  }
  refresh_log_weights();

  // Initial allocations follow the weights alone (the regressions start at
  // their neutral values), then the augmentation is drawn to match.
  state_.alloc.resize(n);
  if (K_ == 1) {
    state_.alloc.setOnes();
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = rng_.uniform();
      double cum = 0.0;
      int label = K_;
      for (int k = 0; k < K_; ++k) {
        cum += std::exp(log_weights_(i, k));
        if (u <= cum) {
          label = k + 1;
          break;
        }
      }
      state_.alloc[i] = label;
    }
  }
  state_.q_latent.resize(n, K_ - 1);
  draw_augmentation();
}

void Sampler::refresh_log_weights() {
  const Eigen::Index n = problem_.n();
  log_weights_.resize(n, K_);
  Eigen::VectorXd alphas(K_ - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = problem_.exposure[i];
    const int v = segment_[i];
    for (int k = 0; k + 1 < K_; ++k) {
      alphas[k] = state_.eta(k, 0) + state_.eta(k, v) * x;
    }
    log_weights_.row(i) = psbp::log_stick_break(alphas);
  }
}

void Sampler::draw_allocations() {
  const Eigen::Index n = problem_.n();
  if (K_ == 1) {
    state_.alloc.setOnes();
    return;
  }
  likelihood_means_.noalias() = problem_.design * state_.theta_y.transpose();  // n x K
  Eigen::VectorXd log_norm(K_);
  Eigen::VectorXd half_inv_var(K_);
  for (int k = 0; k < K_; ++k) {
    const double sd = state_.sigma_y[k];
    log_norm[k] = -std::log(sd) - 0.5 * kLog2Pi;
    half_inv_var[k] = 0.5 / (sd * sd);
  }
  Eigen::VectorXd lp(K_);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = problem_.response[i];
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K_; ++k) {
      const double r = y - likelihood_means_(i, k);
      lp[k] = log_weights_(i, k) + log_norm[k] - half_inv_var[k] * r * r;
      if (lp[k] > best) {
        best = lp[k];
      }
    }
    if (!std::isfinite(best)) {
      throw NumericalError("allocation probabilities vanished for every component at row " +
                           std::to_string(i + 1));
    }
    double total = 0.0;
    for (int k = 0; k < K_; ++k) {
      lp[k] = std::exp(lp[k] - best);
      total += lp[k];
    }
    const double target = rng_.uniform() * total;
    double cum = 0.0;
    int label = 0;
    for (int k = 0; k < K_; ++k) {
      if (lp[k] > 0.0) {
        cum += lp[k];
        label = k + 1;
        if (cum >= target) {
          break;
        }
      }
    }
    state_.alloc[i] = label;
  }
}

void Sampler::draw_component_regressions() {
  for (int k = 1; k <= K_; ++k) {
    draw_component_regression(k);
  }
}

void Sampler::draw_component_regression(int k) {
  const Eigen::Index n = problem_.n();
  const Eigen::Index d = problem_.design.cols();
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(d);
  double yty = 0.0;
  Eigen::Index rows = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (state_.alloc[i] != k) {
      continue;
    }
    const auto row = problem_.design.row(i);
    xtx.noalias() += row.transpose() * row;
    const double y = problem_.response[i];
    xty.noalias() += row.transpose() * y;
    yty += y * y;
    ++rows;
  }
  const auto posterior = conjugate::nig_posterior(y_prior_, xtx, xty, yty, rows);
  const auto [theta, sigma2] = conjugate::draw_nig(posterior, rng_);
  state_.theta_y.row(k - 1) = theta.transpose();
  state_.sigma_y[k - 1] = std::sqrt(sigma2);
}

void Sampler::draw_eta() {
  const Eigen::Index n = problem_.n();
  const int V = problem_.knots.segments();
  const Eigen::VectorXd prior_mean = Eigen::VectorXd::Constant(1 + V, mu_eta_);
  Eigen::MatrixXd xtx(1 + V, 1 + V);
  Eigen::VectorXd xtq(1 + V);
  for (int k = 0; k + 1 < K_; ++k) {
    xtx.setZero();
    xtq.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = state_.q_latent(i, k);
      if (std::isnan(q)) {
        continue;
      }
      const double x = problem_.exposure[i];
      const int v = segment_[i];
      xtx(0, 0) += 1.0;
      xtx(v, 0) += x;
      xtx(0, v) += x;
      xtx(v, v) += x * x;
      xtq[0] += q;
      xtq[v] += q * x;
    }
    const auto posterior = conjugate::unit_noise_posterior(prior_mean, xtx, xtq);
    state_.eta.row(k) = conjugate::draw_gaussian(posterior, rng_).transpose();
  }
  // The last component never enters the stick-breaking weights, so its row
  // has no data and is refreshed from the prior.
  for (Eigen::Index v = 0; v <= V; ++v) {
    state_.eta(K_ - 1, v) = rng_.normal(mu_eta_, 1.0);
  }
}

void Sampler::draw_augmentation() {
  const Eigen::Index n = problem_.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = state_.alloc[i];
    const int m = std::min(s, K_ - 1);
    const double x = problem_.exposure[i];
    const int v = segment_[i];
    for (int k = 1; k <= m; ++k) {
      const double alpha = state_.eta(k - 1, 0) + state_.eta(k - 1, v) * x;
      state_.q_latent(i, k - 1) =
          (k == s) ? rng_.trunc_normal_positive(alpha) : rng_.trunc_normal_negative(alpha);
    }
    for (int k = m + 1; k <= K_ - 1; ++k) {
      state_.q_latent(i, k - 1) = kNaN;
    }
  }
}

void Sampler::draw_w_regression() {
  if (!problem_.with_w) {
    return;
  }
  const auto posterior =
      conjugate::nig_posterior(w_prior_, w_xtx_, w_xty_, w_yty_, problem_.n());
  const auto [theta, sigma2] = conjugate::draw_nig(posterior, rng_);
  state_.theta_w = theta;
  state_.sigma_w = std::sqrt(sigma2);
}

void Sampler::sweep() {
  draw_allocations();
  draw_component_regressions();
  draw_eta();
  draw_augmentation();
  refresh_log_weights();
  draw_w_regression();
}

Draw Sampler::snapshot() const {
  Draw d;
  d.theta_y = state_.theta_y;
  d.sigma_y = state_.sigma_y;
  d.theta_w = state_.theta_w;
  d.sigma_w = state_.sigma_w;
  d.eta = state_.eta;
  return d;
}

ChainOutput run_chain(const MixtureProblem& problem, const ModelConfig& config, RngStream rng,
                      const DrawHook& hook, Eigen::Index hook_size) {
  const auto start = std::chrono::steady_clock::now();
  config.validate(problem.n());
  Sampler sampler(problem, config, rng);

  ChainOutput out;
  const int n_retained = config.retained();
  out.retained.reserve(static_cast<size_t>(n_retained));
  if (hook && hook_size > 0) {
    out.cerf.setConstant(n_retained, hook_size, kNaN);
  }
  int kept = 0;
  for (int r = 1; r <= config.iterations; ++r) {
    sampler.sweep();
    if (r > config.burn_in && (r - config.burn_in) % config.thinning == 0) {
      Draw draw = sampler.snapshot();
      if (hook && hook_size > 0) {
        if (auto values = hook(draw)) {
          if (values->size() != hook_size) {
            throw NumericalError("draw hook returned an unexpected grid length");
          }
          out.cerf.row(kept) = values->transpose();
        } else {
          out.cerf_failed.push_back(kept);
        }
      }
      out.retained.push_back(std::move(draw));
      ++kept;
    }
  }
  out.meta.seed = config.seed;
  out.meta.iterations = config.iterations;
  out.meta.burn_in = config.burn_in;
  out.meta.thinning = config.thinning;
  out.meta.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace gibbs
}  // namespace bnpnc
