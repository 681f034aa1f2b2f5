#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "taukit/lattice.hpp"
#include "taukit/sparse_pmf.hpp"

namespace taukit {

/// r-th moment variation |g|_r = sum_x (1/2)(1 + |x|^r) |g(x)|.
/// At r = 0 this is the plain 1-norm (total variation of a difference).
inline double moment_variation(const SparsePmf& g, int r, const NormSpec& norm) {
  if (r < 0) throw std::invalid_argument("moment_variation: r must be >= 0");
  double s = 0;
  for (auto& [x, w] : g.entries()) s += 0.5 * moment_weight(norm, x, r) * std::abs(w);
  return s;
}

/// sum_x |p1(x) - p2(x)| over the union support.
inline double tv_distance(const SparsePmf& p1, const SparsePmf& p2) {
  double s = 0;
  for (auto& [x, w] : p1.entries()) s += std::abs(w - p2.at(x));
  for (auto& [x, w] : p2.entries())
    if (p1.at(x) == 0.0) s += std::abs(w);
  return s;
}

/// |E_p1 |x|^r - E_p2 |x|^r|.
inline double moment_error(const SparsePmf& p1, const SparsePmf& p2, int r,
                           const NormSpec& norm) {
  double m1 = 0, m2 = 0;
  for (auto& [x, w] : p1.entries()) m1 += std::pow(state_norm(norm, x), r) * w;
  for (auto& [x, w] : p2.entries()) m2 += std::pow(state_norm(norm, x), r) * w;
  return std::abs(m1 - m2);
}

/// Smallest alpha with (1 + |x|^r1) <= alpha (1 + |x|^r2) over the given
/// box, i.e. an empirical comparison constant with |g|_r1 <= alpha |g|_r2
/// for measures supported in the box. On the integer lattice with the
/// one-norm this is exactly 1 for r1 < r2.
inline double norm_comparison_constant(int r1, int r2, const NormSpec& norm,
                                       const std::vector<Coord>& lower,
                                       const std::vector<Coord>& upper) {
  if (!(0 < r1 && r1 < r2)) throw std::invalid_argument("norm_comparison_constant: need 0 < r1 < r2");
  if (lower.size() != upper.size()) throw std::invalid_argument("box bounds mismatch");
  const std::size_t n = lower.size();
  for (std::size_t i = 0; i < n; ++i)
    if (lower[i] > upper[i]) throw std::invalid_argument("box lower bound exceeds upper");
  State x(lower.begin(), lower.end());
  double alpha = 0;
  while (true) {
    alpha = std::max(alpha, moment_weight(norm, x, r1) / moment_weight(norm, x, r2));
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (x[i] < upper[i]) {
        ++x[i];
        break;
      }
      x[i] = lower[i];
    }
    if (i == n) break;
  }
  return alpha;
}

}  // namespace taukit
