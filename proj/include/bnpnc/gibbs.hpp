#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bnpnc/conjugate.hpp"
#include "bnpnc/dataset.hpp"
#include "bnpnc/psbp.hpp"
#include "bnpnc/rng.hpp"

namespace bnpnc {
namespace gibbs {

// Everything one sweep updates. Coefficient row layout for theta_y and
// theta_w is [intercept, exposure, then the remaining design columns];
// sigma entries are residual standard deviations. q_latent holds the probit
// augmentation values, NaN marking entries that were not drawn for the
// current allocation (k exceeding min(S_i, K-1)).
struct ParameterState {
  Eigen::MatrixXd theta_y;   // K x d
  Eigen::VectorXd sigma_y;   // K
  Eigen::VectorXd theta_w;   // dw (size 0 when the W model is absent)
  double sigma_w = 1.0;
  Eigen::MatrixXd eta;       // K x (1+V)
  Eigen::VectorXi alloc;     // n, labels in 1..K
  Eigen::MatrixXd q_latent;  // n x (K-1)
};

// Retained snapshot: the regression blocks only (the n-sized latents are
// chain-internal and have no draw-file columns).
struct Draw {
  Eigen::MatrixXd theta_y;
  Eigen::VectorXd sigma_y;
  Eigen::VectorXd theta_w;
  double sigma_w = 1.0;
  Eigen::MatrixXd eta;
};

struct ChainMeta {
  std::uint64_t seed = 0;
  int iterations = 0;
  int burn_in = 0;
  int thinning = 0;
  double runtime_seconds = 0.0;
};

struct ChainOutput {
  std::vector<Draw> retained;
  // Per-retained-draw CERF evaluations (rows align with retained); empty
  // without a hook. Failed evaluations leave a NaN row and an index below.
  Eigen::MatrixXd cerf;
  std::vector<Eigen::Index> cerf_failed;
  ChainMeta meta;
};

// The data a chain runs on. The mixture regresses `response` on `design`
// rows; the weight process depends on `exposure` through `knots`. The
// non-mixed W regression is optional (negative-control modes only).
struct MixtureProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  Eigen::VectorXd exposure;
  psbp::KnotGrid knots;
  bool with_w = false;
  Eigen::MatrixXd w_design;
  Eigen::VectorXd w_response;

  Eigen::Index n() const { return response.size(); }
};

// Evaluates a causal functional on a retained draw; nullopt signals an
// identification failure for that draw.
using DrawHook = std::function<std::optional<Eigen::VectorXd>(const Draw&)>;

// One Gibbs chain. Public step methods mirror the sweep so each full
// conditional can be validated in isolation; sweep() runs them in order:
// allocations -> component regressions -> eta -> augmentation -> weights ->
// W regression.
class Sampler {
 public:
  Sampler(const MixtureProblem& problem, const ModelConfig& config, RngStream rng);

  void sweep();

  void draw_allocations();
  void draw_component_regressions();
  void draw_component_regression(int k);  // 1-based component label
  void draw_eta();
  void draw_augmentation();
  void refresh_log_weights();
  void draw_w_regression();

  const ParameterState& state() const { return state_; }
  ParameterState& state() { return state_; }
  const Eigen::MatrixXd& log_weights() const { return log_weights_; }

  Draw snapshot() const;

  int components() const { return K_; }

 private:
  void init_state();

  const MixtureProblem& problem_;
  int K_;
  GaussianInverseGammaPrior y_prior_;
  GaussianInverseGammaPrior w_prior_;
  double mu_eta_;
  RngStream rng_;

  ParameterState state_;
  Eigen::MatrixXd log_weights_;  // n x K, refreshed once per sweep
  Eigen::VectorXi segment_;      // 1-based weight-model segment per row

  // W-model sufficient statistics never change.
  Eigen::MatrixXd w_xtx_;
  Eigen::VectorXd w_xty_;
  double w_yty_ = 0.0;

  // scratch
  Eigen::MatrixXd likelihood_means_;
};

// Runs the full loop and retains floor((iterations - burn_in)/thinning)
// thinned post-burn-in snapshots. `hook` (optional) evaluates each retained
// draw on a grid of `hook_size` points. Bit-reproducible for a fixed seed.
ChainOutput run_chain(const MixtureProblem& problem, const ModelConfig& config, RngStream rng,
                      const DrawHook& hook = nullptr, Eigen::Index hook_size = 0);

}  // namespace gibbs
}  // namespace bnpnc
