#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bnpnc {

// Deterministic random stream on top of mt19937_64 (bit-exact across
// platforms by the standard). All variate transforms are implemented here so
// draws do not depend on the standard library's unspecified distribution
// algorithms. Substreams are derived by splitmix64-mixing a (seed, path)
// tuple, so (seed, chain), (seed, scenario, replicate), ... give independent
// reproducible streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
  static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return RngStream(mix(seed, path));
  }

  // Uniform strictly inside (0, 1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by inverse CDF (one uniform per draw).
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Exponential with rate 1.
  double exponential();

  // Gamma(shape, scale 1), Marsaglia-Tsang.
  double gamma(double shape);

  // Inverse gamma with shape a and scale b (mean b/(a-1) for a > 1).
  double inv_gamma(double shape, double scale) { return scale / gamma(shape); }

  // N(mean, 1) truncated to [0, inf) / (-inf, 0]-open conventions per use:
  // positive side is [0, inf), negative side is (-inf, 0).
  double trunc_normal_positive(double mean) { return lower_trunc_std_normal(-mean) + mean; }
  double trunc_normal_negative(double mean) { return -lower_trunc_std_normal(mean) + mean; }

  std::uint64_t raw() { return gen_(); }

 private:
  // Standard normal conditioned on being >= a.
  double lower_trunc_std_normal(double a);

  std::mt19937_64 gen_;
};

}  // namespace bnpnc
