#pragma once

#include <Eigen/Dense>

namespace bnpnc {
namespace psbp {

// Exposure cutpoints q_0 < q_1 < ... < q_V with q_0 = min(x), q_V = max(x)
// and interior points at empirical quantiles. Segment v (1-based) is the
// half-open interval [q_{v-1}, q_v); x == q_V belongs to segment V, and
// points outside [q_0, q_V] extrapolate with the nearest boundary segment.
class KnotGrid {
 public:
  explicit KnotGrid(Eigen::VectorXd cutpoints);

  int segments() const { return static_cast<int>(cutpoints_.size()) - 1; }
  int segment_of(double x) const;
  const Eigen::VectorXd& cutpoints() const { return cutpoints_; }

 private:
  Eigen::VectorXd cutpoints_;
};

// Builds a KnotGrid with interior cutpoints at the type-7 quantiles v/V of x.
// Requires at least V+1 distinct values; throws ValidationError when the
// cutpoints collapse (advising a smaller V).
KnotGrid make_knots(const Eigen::Ref<const Eigen::VectorXd>& x, int segments);

// Piecewise-linear weight-model predictor: eta_row = [eta_0, eta_1..eta_V],
// alpha(x) = eta_0 + eta_v * x with v the segment of x. Shared intercept, so
// alpha is linear within each segment but may jump at cutpoints.
double alpha_at(double x, const Eigen::Ref<const Eigen::RowVectorXd>& eta_row,
                const KnotGrid& knots);

// Truncated probit stick-breaking: K-1 alphas give K weights
//   weight_k = Phi(alpha_k) * prod_{r<k} (1 - Phi(alpha_r)),
// with the final component taking the residual mass so the output is an
// exact simplex point.
Eigen::VectorXd stick_break(const Eigen::Ref<const Eigen::VectorXd>& alphas);

// Same weights in log space (component count = alphas.size() + 1); never
// underflows for finite alphas.
Eigen::VectorXd log_stick_break(const Eigen::Ref<const Eigen::VectorXd>& alphas);

// Mixture weights at exposure x for the full eta matrix (K rows; rows
// 1..K-1 define the alphas, row K only carries prior draws).
Eigen::VectorXd weights_at(double x, const Eigen::Ref<const Eigen::MatrixXd>& eta,
                           const KnotGrid& knots);

}  // namespace psbp
}  // namespace bnpnc
