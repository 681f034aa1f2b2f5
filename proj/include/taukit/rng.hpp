#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace taukit {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// xoshiro256++ with splitmix64 seeding. Self-contained so that sampled
/// values are identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5eed5eed5eed5eedull) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  /// Deterministic independent stream for a worker/sample index.
  static Rng stream(std::uint64_t root_seed, std::uint64_t index) {
    std::uint64_t s = root_seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1] (safe as a log argument).
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
  }

  /// Poisson sample by inversion; lambda is halved recursively so the
  /// running-product never underflows.
  std::int64_t poisson(double lambda) {
    if (lambda < 0 || !std::isfinite(lambda))
      throw std::invalid_argument("poisson: invalid lambda");
    if (lambda == 0) return 0;
    std::int64_t total = 0;
    while (lambda > 30.0) {
      lambda *= 0.5;
      total += poisson(lambda);
    }
    const double limit = std::exp(-lambda);
    double prod = uniform_pos();
    std::int64_t k = 0;
    while (prod > limit) {
      prod *= uniform_pos();
      ++k;
    }
    return total + k;
  }

  /// Binomial sample by cdf inversion (n halved recursively to keep the
  /// (1-p)^n start term representable).
  std::int64_t binomial(std::int64_t n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("binomial: invalid parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    std::int64_t total = 0;
    while (n > 500) {
      const std::int64_t half = n / 2;
      total += binomial(half, p);
      n -= half;
    }
    const bool flipped = p > 0.5;
    const double q = flipped ? 1.0 - p : p;
    const double ratio = q / (1.0 - q);
    double pmf = std::pow(1.0 - q, static_cast<double>(n));
    double cdf = pmf;
    const double u = uniform();
    std::int64_t k = 0;
    while (u > cdf && k < n) {
      ++k;
      pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
      cdf += pmf;
    }
    return total + (flipped ? n - k : k);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t state_[4];
};

}  // namespace taukit
