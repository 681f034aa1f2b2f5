#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "taukit/discrete_dist.hpp"
#include "taukit/lattice.hpp"
#include "taukit/mesh.hpp"
#include "taukit/power_series.hpp"
#include "taukit/reaction_network.hpp"
#include "taukit/rng.hpp"
#include "taukit/sparse_pmf.hpp"
#include "taukit/tau_kernel.hpp"

namespace taukit {

struct EnumerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TauLeapOptions {
  double prune_floor = 1e-18;            // per-entry absolute floor in push_forward
  std::size_t max_product_box = 1u << 22;  // per-state count box enumeration cap
  std::size_t max_support = 5'000'000;   // push_forward support cap
};

/// One tau-leap transition x' = x + nu K. Zero step and states outside
/// Z_+^N (freeze policy) return x unchanged.
inline State tau_step(const TauLeapKernel& kernel, const ReactionNetwork& net, const State& x,
                      double tau, Rng& rng) {
  if (tau < 0) throw std::invalid_argument("tau_step: tau must be >= 0");
  if (tau == 0 || !in_nonneg_orthant(x)) return x;
  State y = x;
  for (int j = 0; j < net.num_reactions(); ++j) {
    const MarginalDist m = kernel_marginal(kernel, net, j, x, tau);
    Coord k = 0;
    switch (m.kind) {
      case CountDistribution::Kind::deterministic_zero:
        break;
      case CountDistribution::Kind::poisson:
        k = rng.poisson(m.lambda);
        break;
      case CountDistribution::Kind::binomial:
        k = rng.binomial(m.trials, m.p);
        break;
    }
    if (k != 0) y = add_scaled(y, net.nu(j), k);
  }
  return y;
}

/// Tau-leap path on the mesh: returns the states at the mesh points
/// (the path is constant on [t_{j-1}, t_j)).
inline std::vector<State> simulate_mesh(const TauLeapKernel& kernel, const ReactionNetwork& net,
                                        const State& x0, const Mesh& mesh, Rng& rng) {
  std::vector<State> states;
  states.reserve(mesh.points().size());
  states.push_back(x0);
  for (int i = 0; i < mesh.steps(); ++i)
    states.push_back(tau_step(kernel, net, states.back(), mesh.step(i), rng));
  return states;
}

namespace tau_detail {

inline double marginal_pmf(const MarginalDist& m, Coord k) {
  switch (m.kind) {
    case CountDistribution::Kind::deterministic_zero:
      return k == 0 ? 1.0 : 0.0;
    case CountDistribution::Kind::poisson:
      return poisson_pmf(m.lambda, k);
    case CountDistribution::Kind::binomial:
      return binomial_pmf(m.trials, m.p, k);
  }
  return 0.0;
}

inline Coord marginal_tail_cut(const MarginalDist& m, double tail) {
  switch (m.kind) {
    case CountDistribution::Kind::deterministic_zero:
      return 0;
    case CountDistribution::Kind::poisson:
      return poisson_tail_cut(m.lambda, tail);
    case CountDistribution::Kind::binomial:
      return binomial_tail_cut(m.trials, m.p, tail);
  }
  return 0;
}

}  // namespace tau_detail

/// phi~(tau, x; k): probability that the step fires count vector k, the
/// product of the per-reaction marginals.
inline double count_pmf(const TauLeapKernel& kernel, const ReactionNetwork& net, const State& x,
                        double tau, const CountVec& k) {
  if (static_cast<int>(k.size()) != net.num_reactions())
    throw std::invalid_argument("count_pmf: count vector length mismatch");
  for (Coord kj : k)
    if (kj < 0) return 0.0;
  const bool frozen = tau == 0 || !in_nonneg_orthant(x);
  double p = 1.0;
  for (int j = 0; j < net.num_reactions(); ++j) {
    if (frozen) {
      if (k[j] != 0) return 0.0;
      continue;
    }
    p *= tau_detail::marginal_pmf(kernel_marginal(kernel, net, j, x, tau), k[j]);
    if (p == 0.0) return 0.0;
  }
  return p;
}

/// i-th tau-derivative of phi~(tau, x; k) at tau = 0, evaluated analytically
/// by composing each marginal's pmf (a polynomial in its count parameter)
/// with the parameter's Taylor polynomial and multiplying the per-reaction
/// series.
inline double count_pmf_derivative(const TauLeapKernel& kernel, const ReactionNetwork& net,
                                   const State& x, int order, const CountVec& k) {
  if (static_cast<int>(k.size()) != net.num_reactions())
    throw std::invalid_argument("count_pmf_derivative: count vector length mismatch");
  if (order < 0) throw std::invalid_argument("count_pmf_derivative: order must be >= 0");
  for (Coord kj : k)
    if (kj < 0) return 0.0;
  const bool zero_count = std::all_of(k.begin(), k.end(), [](Coord c) { return c == 0; });
  if (!in_nonneg_orthant(x)) return order == 0 ? (zero_count ? 1.0 : 0.0) : 0.0;

  TruncatedSeries product = TruncatedSeries::constant(order, 1.0);
  for (int j = 0; j < net.num_reactions(); ++j) {
    const auto& dist = kernel.counts.at(j);
    if (dist.kind != CountDistribution::Kind::deterministic_zero && order > dist.param.max_order)
      throw KernelError(kernel.name + ": derivative order " + std::to_string(order) +
                        " unsupported by reaction " + std::to_string(j + 1));
    TruncatedSeries marginal(order);
    switch (dist.kind) {
      case CountDistribution::Kind::deterministic_zero:
        marginal[0] = k[j] == 0 ? 1.0 : 0.0;
        break;
      case CountDistribution::Kind::poisson: {
        // psi_k(lambda) = sum_m (-1)^m lambda^(k+m) / (k! m!)
        TruncatedSeries lam(order);
        double factorial = 1;
        for (int i = 1; i <= order; ++i) {
          factorial *= i;
          lam[i] = dist.param.deriv0(net, x, i) / factorial;
        }
        std::vector<double> psi(order + 1, 0.0);
        double kfact = 1;
        for (Coord c = 2; c <= k[j]; ++c) kfact *= static_cast<double>(c);
        double mfact = 1;
        for (int m = 0; k[j] + m <= order; ++m) {
          if (m > 0) mfact *= m;
          psi[k[j] + m] = (m % 2 == 0 ? 1.0 : -1.0) / (kfact * mfact);
        }
        marginal = TruncatedSeries::compose(psi, lam);
        break;
      }
      case CountDistribution::Kind::binomial: {
        const Coord n = dist.trials(net, x);
        if (k[j] > n) return 0.0;
        // psi_k(p) = C(n,k) p^k sum_m C(n-k,m) (-p)^m
        TruncatedSeries pser(order);
        double factorial = 1;
        for (int i = 1; i <= order; ++i) {
          factorial *= i;
          pser[i] = dist.param.deriv0(net, x, i) / factorial;
        }
        std::vector<double> psi(order + 1, 0.0);
        double cnk = 1;
        for (Coord c = 0; c < k[j]; ++c)
          cnk *= static_cast<double>(n - c) / static_cast<double>(c + 1);
        double cm = 1;
        for (int m = 0; k[j] + m <= order; ++m) {
          if (m > 0) cm *= static_cast<double>(n - k[j] - m + 1) / static_cast<double>(m);
          if (m <= n - k[j]) psi[k[j] + m] = cnk * (m % 2 == 0 ? 1.0 : -1.0) * cm;
        }
        marginal = TruncatedSeries::compose(psi, pser);
        break;
      }
    }
    product = product.mul(marginal);
  }
  double factorial = 1;
  for (int i = 2; i <= order; ++i) factorial *= i;
  return product[order] * factorial;
}

struct TransitionPmf {
  SparsePmf pmf;
  double captured = 0;  // total probability enumerated (>= 1 - mass_tolerance)
};

/// phi(tau, x, x') = sum over count vectors k with x' = x + nu k. Marginals
/// are cut at the 1 - tol/(2M) quantile so the product box captures at least
/// 1 - tol of the count mass.
inline TransitionPmf state_transition_pmf(const TauLeapKernel& kernel, const ReactionNetwork& net,
                                          const State& x, double tau, double mass_tolerance,
                                          const TauLeapOptions& opts = {}) {
  if (!(mass_tolerance > 0 && mass_tolerance < 1))
    throw std::invalid_argument("state_transition_pmf: mass_tolerance must lie in (0,1)");
  TransitionPmf out;
  if (tau == 0 || !in_nonneg_orthant(x)) {
    out.pmf = SparsePmf::point_mass(x);
    out.captured = 1.0;
    return out;
  }
  const int M = net.num_reactions();
  const double tail = mass_tolerance / (2.0 * M);
  std::vector<std::vector<double>> marg(M);
  std::size_t box = 1;
  for (int j = 0; j < M; ++j) {
    const MarginalDist m = kernel_marginal(kernel, net, j, x, tau);
    const Coord cut = tau_detail::marginal_tail_cut(m, tail);
    if (box > opts.max_product_box / (static_cast<std::size_t>(cut) + 1))
      throw EnumerationError("state_transition_pmf: count box exceeds enumeration cap");
    box *= static_cast<std::size_t>(cut) + 1;
    marg[j].resize(cut + 1);
    for (Coord c = 0; c <= cut; ++c) marg[j][c] = tau_detail::marginal_pmf(m, c);
  }

  State y = x;
  double weight = 1.0;
  // depth-first product over the count box, updating the target state in place
  auto enumerate = [&](auto&& self, int j) -> void {
    if (j == M) {
      out.pmf.add(y, weight);
      out.captured += weight;
      return;
    }
    const double saved_weight = weight;
    const State saved_y = y;
    for (Coord c = 0; c < static_cast<Coord>(marg[j].size()); ++c) {
      if (c > 0) y = add_scaled(y, net.nu(j), 1);
      weight = saved_weight * marg[j][c];
      if (weight != 0.0) self(self, j + 1);
    }
    weight = saved_weight;
    y = saved_y;
  };
  enumerate(enumerate, 0);
  return out;
}

struct PushForwardResult {
  SparsePmf pmf;
  double loss = 0;  // uncaptured count mass plus pruned entries
};

/// Deterministic push-forward p -> phi(tau_n) ... phi(tau_1) p through the
/// mesh. The per-step enumeration budget is mass_tolerance / steps, so the
/// cumulative reported loss stays below mass_tolerance.
inline PushForwardResult push_forward(const TauLeapKernel& kernel, const ReactionNetwork& net,
                                      const SparsePmf& p, const Mesh& mesh, double mass_tolerance,
                                      const TauLeapOptions& opts = {}) {
  PushForwardResult res;
  res.pmf = p;
  const int n = mesh.steps();
  if (n == 0) return res;
  const double step_tol = mass_tolerance / n;
  for (int i = 0; i < n; ++i) {
    const double tau = mesh.step(i);
    SparsePmf next;
    for (const auto& [x, w] : res.pmf.sorted_entries()) {
      const TransitionPmf trans = state_transition_pmf(kernel, net, x, tau, step_tol, opts);
      res.loss += std::abs(w) * (1.0 - trans.captured);
      for (const auto& [y, v] : trans.pmf.sorted_entries()) next.add(y, w * v);
    }
    res.loss += next.prune(opts.prune_floor);
    if (next.support_size() > opts.max_support)
      throw EnumerationError("push_forward: support exceeded the cap");
    res.pmf = std::move(next);
  }
  return res;
}

}  // namespace taukit
