#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taukit {

using Coord = std::int64_t;

/// Point of the integer lattice Z^N (molecule counts; components may go
/// negative under unconstrained tau-leap updates).
using State = std::vector<Coord>;

/// Reaction count vectors live on Z_+^M; same representation.
using CountVec = std::vector<Coord>;

inline bool in_nonneg_orthant(const State& x) {
  for (Coord c : x)
    if (c < 0) return false;
  return true;
}

inline State add_scaled(const State& x, const std::vector<Coord>& dir, Coord times) {
  State y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += dir[i] * times;
  return y;
}

struct StateHash {
  std::size_t operator()(const State& x) const noexcept {
    // FNV-1a over the coordinate bytes, mixed per element.
    std::uint64_t h = 1469598103934665603ull;
    for (Coord c : x) {
      std::uint64_t v = static_cast<std::uint64_t>(c);
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

inline bool lex_less(const State& a, const State& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// Norm on R^N used inside the moment weights (1 + |x|^r). The weighted
/// one-norm sum_i alpha_i |x_i| is the norm built from a conservativity
/// vector alpha when certifying step moment growth.
struct NormSpec {
  enum class Kind { one_norm, inf_norm, weighted_one_norm };
  Kind kind = Kind::one_norm;
  std::vector<double> weights;  // weighted_one_norm only; all > 0

  static NormSpec one() { return {Kind::one_norm, {}}; }
  static NormSpec inf() { return {Kind::inf_norm, {}}; }
  static NormSpec weighted(std::vector<double> w) {
    for (double wi : w)
      if (!(wi > 0)) throw std::invalid_argument("NormSpec: weights must be positive");
    return {Kind::weighted_one_norm, std::move(w)};
  }
};

inline double state_norm(const NormSpec& spec, const State& x) {
  switch (spec.kind) {
    case NormSpec::Kind::one_norm: {
      double s = 0;
      for (Coord c : x) s += std::abs(static_cast<double>(c));
      return s;
    }
    case NormSpec::Kind::inf_norm: {
      double m = 0;
      for (Coord c : x) m = std::max(m, std::abs(static_cast<double>(c)));
      return m;
    }
    case NormSpec::Kind::weighted_one_norm: {
      if (spec.weights.size() != x.size())
        throw std::invalid_argument("NormSpec: weight/state dimension mismatch");
      double s = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s += spec.weights[i] * std::abs(static_cast<double>(x[i]));
      return s;
    }
  }
  return 0;
}

/// Moment weight (1 + |x|^r).
inline double moment_weight(const NormSpec& spec, const State& x, int r) {
  if (r == 0) return 2.0;  // 1 + |x|^0, with the 0^0 = 1 lattice convention
  return 1.0 + std::pow(state_norm(spec, x), r);
}

inline std::string to_string(const State& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(x[i]);
  }
  s += ")";
  return s;
}

}  // namespace taukit
