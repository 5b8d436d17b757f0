#include "bnpnc/math.hpp"

#include <algorithm>
#include <cmath>

#include "bnpnc/errors.hpp"

namespace bnpnc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_norm_cdf(double x) {
  if (x > -37.0) {
    return std::log(norm_cdf(x));
  }
  // Mills-ratio series: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6).
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x * kSqrt2Pi) + std::log(series);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw NumericalError("norm_quantile: p must lie strictly in (0,1)");
  }
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step sharpens the ~1e-9 rational approximation to near machine
  // precision. exp(x^2/2) overflows past |x| ~ 37.6, where the raw value is
  // already ample for sampling.
  if (std::fabs(x) < 37.0) {
    const double err = norm_cdf(x) - p;
    const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double quantile_type7_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted, double p) {
  const Eigen::Index n = sorted.size();
  if (n == 0) {
    throw NumericalError("quantile of empty vector");
  }
  if (n == 1) {
    return sorted[0];
  }
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<Eigen::Index>(std::floor(h));
  if (lo >= n - 1) {
    return sorted[n - 1];
  }
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_type7(const Eigen::Ref<const Eigen::VectorXd>& values, double p) {
  return quantile_type7_sorted(sorted_copy(values), p);
}

Eigen::VectorXd sorted_copy(const Eigen::Ref<const Eigen::VectorXd>& values) {
  Eigen::VectorXd out = values;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const Eigen::Index n = values.size();
  if (n < 2) {
    return 0.0;
  }
  const double mean = values.mean();
  return std::sqrt((values.array() - mean).square().sum() / static_cast<double>(n - 1));
}

Eigen::Index count_distinct(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() == 0) {
    return 0;
  }
  const Eigen::VectorXd sorted = sorted_copy(values);
  Eigen::Index distinct = 1;
  for (Eigen::Index i = 1; i < sorted.size(); ++i) {
    if (sorted[i] != sorted[i - 1]) {
      ++distinct;
    }
  }
  return distinct;
}

}  // namespace bnpnc
