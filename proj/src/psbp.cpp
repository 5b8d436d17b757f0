#include "bnpnc/psbp.hpp"

#include <algorithm>
#include <string>

#include "bnpnc/errors.hpp"
#include "bnpnc/math.hpp"

namespace bnpnc {
namespace psbp {

KnotGrid::KnotGrid(Eigen::VectorXd cutpoints) : cutpoints_(std::move(cutpoints)) {
  if (cutpoints_.size() < 2) {
    throw ValidationError("a knot grid needs at least 2 cutpoints");
  }
  for (Eigen::Index v = 1; v < cutpoints_.size(); ++v) {
    if (!(cutpoints_[v] > cutpoints_[v - 1])) {
      throw ValidationError("knot cutpoints must be strictly ascending");
    }
  }
}

int KnotGrid::segment_of(double x) const {
  const int V = segments();
  if (x < cutpoints_[1]) {
    return 1;
  }
  if (x >= cutpoints_[V - 1]) {
    return V;
  }
  // cutpoints_[1] <= x < cutpoints_[V-1]; find v with q_{v-1} <= x < q_v.
  const double* begin = cutpoints_.data();
  const double* it = std::upper_bound(begin + 1, begin + V, x);
  return static_cast<int>(it - begin);
}

KnotGrid make_knots(const Eigen::Ref<const Eigen::VectorXd>& x, int segments) {
  if (segments < 1) {
    throw ValidationError("segment count must be >= 1");
  }
  if (count_distinct(x) < static_cast<Eigen::Index>(segments) + 1) {
    throw ValidationError("x has fewer than " + std::to_string(segments + 1) +
                          " distinct values; use a smaller segment count");
  }
  const Eigen::VectorXd sorted = sorted_copy(x);
  Eigen::VectorXd cuts(segments + 1);
  cuts[0] = sorted[0];
  cuts[segments] = sorted[sorted.size() - 1];
  for (int v = 1; v < segments; ++v) {
    cuts[v] = quantile_type7_sorted(sorted, static_cast<double>(v) / segments);
  }
  for (int v = 1; v <= segments; ++v) {
    if (!(cuts[v] > cuts[v - 1])) {
      throw ValidationError("quantile cutpoints are not distinct; use a smaller segment count");
    }
  }
  return KnotGrid(std::move(cuts));
}

double alpha_at(double x, const Eigen::Ref<const Eigen::RowVectorXd>& eta_row,
                const KnotGrid& knots) {
  const int v = knots.segment_of(x);
  return eta_row[0] + eta_row[v] * x;
}

Eigen::VectorXd stick_break(const Eigen::Ref<const Eigen::VectorXd>& alphas) {
  const Eigen::Index K = alphas.size() + 1;
  Eigen::VectorXd weights(K);
  double remaining = 1.0;
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    const double take = norm_cdf(alphas[k]);
    weights[k] = take * remaining;
    remaining *= 1.0 - take;
  }
  weights[K - 1] = remaining;
  return weights;
}

Eigen::VectorXd log_stick_break(const Eigen::Ref<const Eigen::VectorXd>& alphas) {
  const Eigen::Index K = alphas.size() + 1;
  Eigen::VectorXd log_weights(K);
  double log_remaining = 0.0;
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    log_weights[k] = log_norm_cdf(alphas[k]) + log_remaining;
    log_remaining += log_norm_cdf(-alphas[k]);
  }
  log_weights[K - 1] = log_remaining;
  return log_weights;
}

Eigen::VectorXd weights_at(double x, const Eigen::Ref<const Eigen::MatrixXd>& eta,
                           const KnotGrid& knots) {
  const Eigen::Index K = eta.rows();
  Eigen::VectorXd alphas(K - 1);
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    alphas[k] = alpha_at(x, eta.row(k), knots);
  }
  return stick_break(alphas);
}

}  // namespace psbp
}  // namespace bnpnc
