#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "taukit/lattice.hpp"
#include "taukit/reaction_network.hpp"
#include "taukit/sparse_pmf.hpp"

namespace taukit {

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finite box restriction of the forward equation plus the mass budget the
/// oracle must respect.
struct TruncationSpec {
  std::vector<Coord> lower;
  std::vector<Coord> upper;
  double mass_tolerance = 1e-10;
  std::size_t max_box_states = 2'000'000;  // keeps the per-reaction tables in memory
  double max_series_terms = 500'000;
};

struct CmeSolution {
  SparsePmf pmf;
  double truncation_loss = 0;       // sink mass + series tail bound
  double uniformization_rate = 0;   // Lambda
  int series_terms = 0;
};

/// Transient solution e^{Qt} p0 on the truncated box by uniformization
/// (Jensen's method). Outflow through the box boundary is redirected to an
/// absorbing sink whose mass is reported as truncation loss, and the Poisson
/// series is cut once its tail drops below half the mass tolerance, so the
/// reported loss is a rigorous bound. Raises TruncationError when the box
/// cannot meet the tolerance.
inline CmeSolution cme_solve(const ReactionNetwork& net, const SparsePmf& p0, double t,
                             const TruncationSpec& trunc) {
  const int N = net.num_species();
  if (static_cast<int>(trunc.lower.size()) != N || static_cast<int>(trunc.upper.size()) != N)
    throw std::invalid_argument("cme_solve: truncation box dimension mismatch");
  if (!(trunc.mass_tolerance > 0 && trunc.mass_tolerance < 1))
    throw std::invalid_argument("cme_solve: mass_tolerance must lie in (0,1)");
  if (t < 0) throw std::invalid_argument("cme_solve: t must be >= 0");

  std::size_t total = 1;
  std::vector<std::size_t> stride(N, 1);
  for (int i = 0; i < N; ++i) {
    if (trunc.lower[i] > trunc.upper[i])
      throw std::invalid_argument("cme_solve: box lower bound exceeds upper");
    const auto dim = static_cast<std::size_t>(trunc.upper[i] - trunc.lower[i] + 1);
    stride[i] = total;
    if (dim != 0 && total > trunc.max_box_states / dim)
      throw std::invalid_argument("cme_solve: truncation box too large");
    total *= dim;
  }

  auto index_of = [&](const State& x) -> std::int64_t {
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
      if (x[i] < trunc.lower[i] || x[i] > trunc.upper[i]) return -1;
      idx += stride[i] * static_cast<std::size_t>(x[i] - trunc.lower[i]);
    }
    return static_cast<std::int64_t>(idx);
  };
  auto state_of = [&](std::size_t idx) {
    State x(N);
    for (int i = 0; i < N; ++i) {
      const auto dim = static_cast<std::size_t>(trunc.upper[i] - trunc.lower[i] + 1);
      x[i] = trunc.lower[i] + static_cast<Coord>((idx / stride[i]) % dim);
    }
    return x;
  };

  std::vector<double> dense(total, 0.0);
  double p0_mass = 0;
  for (auto& [x, w] : p0.entries()) {
    const std::int64_t idx = index_of(x);
    if (idx < 0)
      throw std::invalid_argument("cme_solve: p0 not supported inside the truncation box");
    dense[static_cast<std::size_t>(idx)] += w;
    p0_mass += std::abs(w);
  }

  const int M = net.num_reactions();
  std::vector<std::vector<double>> rate(M, std::vector<double>(total, 0.0));
  std::vector<std::vector<std::int64_t>> target(M, std::vector<std::int64_t>(total, -1));
  std::vector<double> a0(total, 0.0);
  double lambda_max = 0;
  for (std::size_t s = 0; s < total; ++s) {
    const State x = state_of(s);
    for (int j = 0; j < M; ++j) {
      const double a = propensity(net, j, x);
      if (a > 0) {
        rate[j][s] = a;
        target[j][s] = index_of(net.apply_reaction(x, j));  // -1 = sink
        a0[s] += a;
      }
    }
    lambda_max = std::max(lambda_max, a0[s]);
  }

  CmeSolution sol;
  sol.uniformization_rate = lambda_max;
  if (t == 0 || lambda_max == 0) {
    for (std::size_t s = 0; s < total; ++s)
      if (dense[s] != 0.0) sol.pmf.add(state_of(s), dense[s]);
    return sol;
  }

  const double lt = lambda_max * t;
  // Weights around the mode need ~ lt + O(sqrt(lt)) terms.
  if (lt + 12 * std::sqrt(lt) + 50 > trunc.max_series_terms)
    throw std::domain_error("cme_solve: uniformization rate overflow (Lambda*t too large)");

  std::vector<double> cur = dense;
  std::vector<double> next(total, 0.0);
  std::vector<double> accum(total, 0.0);
  double sink = 0.0;       // probability flowed out of the box, per power of P~
  double sink_accum = 0.0; // Poisson-weighted sink mass
  double weight_sum = 0.0;
  const double target_mass = 1.0 - trunc.mass_tolerance / 2;
  const auto log_lt = std::log(lt);
  int m = 0;
  while (true) {
    const double w = std::exp(-lt + m * log_lt - std::lgamma(static_cast<double>(m) + 1.0));
    for (std::size_t s = 0; s < total; ++s) accum[s] += w * cur[s];
    sink_accum += w * sink;
    weight_sum += w;
    if (weight_sum >= target_mass) break;
    if (m >= trunc.max_series_terms)
      throw std::domain_error("cme_solve: uniformization series failed to converge");
    // next = (I + Q/Lambda) cur, with boundary outflow into the sink
    for (std::size_t s = 0; s < total; ++s)
      next[s] = cur[s] * (1.0 - a0[s] / lambda_max);
    for (int j = 0; j < M; ++j) {
      const auto& rj = rate[j];
      const auto& tj = target[j];
      for (std::size_t s = 0; s < total; ++s) {
        if (rj[s] == 0.0) continue;
        const double flow = cur[s] * rj[s] / lambda_max;
        if (tj[s] >= 0)
          next[static_cast<std::size_t>(tj[s])] += flow;
        else
          sink += flow;
      }
    }
    cur.swap(next);
    ++m;
  }
  sol.series_terms = m + 1;

  const double series_tail = std::max(0.0, 1.0 - weight_sum) * p0_mass;
  sol.truncation_loss = sink_accum + series_tail;
  if (sol.truncation_loss > trunc.mass_tolerance)
    throw TruncationError("cme_solve: truncation box too small (loss " +
                          std::to_string(sol.truncation_loss) + " exceeds tolerance)");

  for (std::size_t s = 0; s < total; ++s)
    if (accum[s] != 0.0) sol.pmf.add(state_of(s), accum[s]);
  return sol;
}

/// sum_x (1 + |x|^r) pmf(x), the moment functional behind the growth bounds.
inline double cme_moment(const SparsePmf& pmf, int r, const NormSpec& norm) {
  if (r < 0) throw std::invalid_argument("cme_moment: r must be >= 0");
  double s = 0;
  for (auto& [x, w] : pmf.entries()) s += moment_weight(norm, x, r) * w;
  return s;
}

}  // namespace taukit
