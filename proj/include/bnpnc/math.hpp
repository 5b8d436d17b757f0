#pragma once

#include <Eigen/Dense>

namespace bnpnc {

// Standard normal CDF via erfc; absolute error <= 1e-15 over the real line.
double norm_cdf(double x);

// log(norm_cdf(x)), finite for all finite x (asymptotic series in the far
// left tail where erfc underflows).
double log_norm_cdf(double x);

// Standard normal quantile (inverse CDF), strictly on (0, 1).
// Acklam's rational approximation polished with one Halley step.
double norm_quantile(double p);

// Type-7 empirical quantile (linear interpolation of order statistics)
// of an ascending-sorted vector; p in [0, 1].
double quantile_type7_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted, double p);

// Convenience: sorts a copy, then quantile_type7_sorted.
double quantile_type7(const Eigen::Ref<const Eigen::VectorXd>& values, double p);

Eigen::VectorXd sorted_copy(const Eigen::Ref<const Eigen::VectorXd>& values);

// Sample standard deviation with n-1 denominator.
double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& values);

// Count of distinct values.
Eigen::Index count_distinct(const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace bnpnc
