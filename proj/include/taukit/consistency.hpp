#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "taukit/lattice.hpp"
#include "taukit/reaction_network.hpp"
#include "taukit/tau_leap.hpp"

namespace taukit {

struct ConsistencyEntry {
  int order;         // derivative order i
  CountVec k;
  double phi_deriv;  // phi~^(i)(0, x; k)
  double q_power;    // Q~^i(x; 0, k)
  double residual;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  double max_residual = 0;
  double threshold = 0;
  bool pass = false;
};

namespace consistency_detail {

using CountMap = std::unordered_map<CountVec, double, StateHash>;

/// One application of the count-space generator: from k' the count process
/// moves to k' + e_j at rate a_j(x + nu k') and loses a_0(x + nu k').
inline CountMap apply_count_generator(const ReactionNetwork& net, const State& x,
                                      const CountMap& v) {
  CountMap out;
  const int M = net.num_reactions();
  for (const auto& [k, w] : v) {
    if (w == 0.0) continue;
    State y = x;
    for (int j = 0; j < M; ++j) y = add_scaled(y, net.nu(j), k[j]);
    double a0 = 0;
    for (int j = 0; j < M; ++j) {
      const double a = propensity(net, j, y);
      if (a == 0.0) continue;
      a0 += a;
      CountVec kj = k;
      ++kj[j];
      auto [it, inserted] = out.try_emplace(std::move(kj), a * w);
      if (!inserted) it->second += a * w;
    }
    if (a0 != 0.0) {
      auto [it, inserted] = out.try_emplace(k, -a0 * w);
      if (!inserted) it->second += -a0 * w;
    }
  }
  return out;
}

inline void enumerate_counts(int M, int budget, CountVec& k, std::vector<CountVec>& out, int j = 0) {
  if (j == M) {
    out.push_back(k);
    return;
  }
  for (int c = 0; c <= budget; ++c) {
    k[j] = c;
    enumerate_counts(M, budget - c, k, out, j + 1);
  }
  k[j] = 0;
}

}  // namespace consistency_detail

/// Pointwise consistency of order q at state x: compares the analytic
/// derivatives phi~^(i)(0, x; k) with Q~^i(x; 0, k) for i = 1..q over the
/// count box |k|_1 <= q + 1 (which contains the full support of Q~^q from 0,
/// the extra shell catching spurious kernel mass). The pass threshold scales
/// with (1 + a_0(x)^q) since the residuals are built from propensity products.
inline ConsistencyReport consistency_check(const TauLeapKernel& kernel,
                                           const ReactionNetwork& net, const State& x, int q,
                                           double tolerance) {
  if (q < 1) throw std::invalid_argument("consistency_check: q must be >= 1");
  const int M = net.num_reactions();

  std::vector<CountVec> box;
  CountVec scratch(M, 0);
  consistency_detail::enumerate_counts(M, q + 1, scratch, box);

  ConsistencyReport report;
  consistency_detail::CountMap power;
  power[CountVec(M, 0)] = 1.0;
  for (int i = 1; i <= q; ++i) {
    power = consistency_detail::apply_count_generator(net, x, power);
    for (const auto& k : box) {
      const auto it = power.find(k);
      const double qi = it == power.end() ? 0.0 : it->second;
      const double di = count_pmf_derivative(kernel, net, x, i, k);
      report.entries.push_back({i, k, di, qi, std::abs(di - qi)});
      report.max_residual = std::max(report.max_residual, std::abs(di - qi));
    }
  }
  report.threshold = tolerance * (1.0 + std::pow(total_propensity(net, x), q));
  report.pass = report.max_residual <= report.threshold;
  return report;
}

}  // namespace taukit
