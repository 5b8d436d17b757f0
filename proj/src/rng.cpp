#include "bnpnc/rng.hpp"

#include <cmath>

#include "bnpnc/math.hpp"

namespace bnpnc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::mix(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t word : path) {
    state ^= word * 0xff51afd7ed558ccdULL;
    out = splitmix64(state);
  }
  return out;
}

double RngStream::normal() { return norm_quantile(uniform()); }

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape) {
  if (shape < 1.0) {
    // Boost to shape+1 and scale back by U^(1/shape).
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) {
      continue;
    }
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double RngStream::lower_trunc_std_normal(double a) {
  if (a <= 6.0) {
    // Inverse CDF in the upper-tail parametrization, accurate for large a.
    const double tail = norm_cdf(-a);
    const double u = uniform();
    return -norm_quantile(tail * (1.0 - u));
  }
  // Robert's exponential-proposal rejection for the deep tail.
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = a + exponential() / lambda;
    const double diff = x - lambda;
    if (uniform() <= std::exp(-0.5 * diff * diff)) {
      return x;
    }
  }
  // Inverse-CDF fallback with the tail probability clamped away from zero;
  // unreachable in practice (acceptance rate of the proposal is ~1 out here).
  const double tail = std::max(norm_cdf(-a), 1e-300);
  return -norm_quantile(tail * (1.0 - uniform()));
}

}  // namespace bnpnc
