#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taukit/cme.hpp"
#include "taukit/discrete_dist.hpp"
#include "taukit/lattice.hpp"
#include "taukit/reaction_network.hpp"
#include "taukit/ssa.hpp"
#include "taukit/tau_leap.hpp"

namespace taukit {

/// Per-reaction polynomial growth classification: degree s_j, the linearly
/// bounded set (s_j <= 1) and its superlinear complement.
struct GrowthClassification {
  std::vector<int> degrees;
  std::vector<bool> linearly_bounded;
  std::vector<int> superlinear;  // reaction indices, ascending
  int s_star = 0;
};

inline GrowthClassification classify_growth(const ReactionNetwork& net) {
  GrowthClassification g;
  for (int j = 0; j < net.num_reactions(); ++j) {
    const int d = net.propensity_spec(j).degree();
    g.degrees.push_back(d);
    g.linearly_bounded.push_back(d <= 1);
    if (d > 1) g.superlinear.push_back(j);
    g.s_star = std::max(g.s_star, d);
  }
  return g;
}

/// Positive integer vector with alpha^T nu_j <= 0 for every superlinear
/// reaction, the certificate behind the moment growth bound.
struct AlphaCertificate {
  std::vector<Coord> alpha;
  std::vector<std::pair<int, Coord>> checked_inner_products;  // (reaction, alpha^T nu_j)
};

/// Lexicographically smallest alpha in {1..search_bound}^N satisfying the
/// superlinear inner-product condition, or nullopt when the bound is
/// exhausted.
inline std::optional<AlphaCertificate> find_alpha(const ReactionNetwork& net,
                                                  Coord search_bound = 20) {
  if (search_bound < 1) throw std::invalid_argument("find_alpha: search_bound must be >= 1");
  const GrowthClassification g = classify_growth(net);
  const int N = net.num_species();
  std::vector<Coord> alpha(N, 1);
  while (true) {
    bool ok = true;
    std::vector<std::pair<int, Coord>> inner;
    for (int j : g.superlinear) {
      Coord dot = 0;
      for (int i = 0; i < N; ++i) dot += alpha[i] * net.nu(j)[i];
      inner.emplace_back(j, dot);
      if (dot > 0) {
        ok = false;
        break;
      }
    }
    if (ok) return AlphaCertificate{alpha, std::move(inner)};
    int i = N - 1;
    for (; i >= 0; --i) {
      if (alpha[i] < search_bound) {
        ++alpha[i];
        break;
      }
      alpha[i] = 1;
    }
    if (i < 0) return std::nullopt;
  }
}

struct ConservativityViolation {
  State x;
  int reaction;
  double rate;
};

struct ConservativityReport {
  bool conservative = true;
  std::vector<ConservativityViolation> violations;
};

/// Exhaustive check of "x + nu_j outside Z_+^N implies a_j(x) = 0" on a box
/// inside the non-negative orthant.
inline ConservativityReport check_conservative(const ReactionNetwork& net,
                                               const std::vector<Coord>& lower,
                                               const std::vector<Coord>& upper) {
  const int N = net.num_species();
  if (static_cast<int>(lower.size()) != N || static_cast<int>(upper.size()) != N)
    throw std::invalid_argument("check_conservative: box dimension mismatch");
  ConservativityReport report;
  for (int i = 0; i < N; ++i) {
    if (lower[i] < 0) throw std::invalid_argument("check_conservative: box must lie in Z_+^N");
    if (lower[i] > upper[i]) return report;  // empty box, vacuous pass
  }
  State x(lower.begin(), lower.end());
  while (true) {
    for (int j = 0; j < net.num_reactions(); ++j) {
      if (in_nonneg_orthant(net.apply_reaction(x, j))) continue;
      const double a = propensity(net, j, x);
      if (a > 0) {
        report.conservative = false;
        report.violations.push_back({x, j, a});
      }
    }
    int i = 0;
    for (; i < N; ++i) {
      if (x[i] < upper[i]) {
        ++x[i];
        break;
      }
      x[i] = lower[i];
    }
    if (i == N) break;
  }
  return report;
}

/// Empirical certificate for an exponential moment growth bound: lambda_hat
/// is the smallest non-negative rate with value(t) <= base e^{lambda_hat t}
/// across the evidence grid. A grid certificate, not a proof.
struct MomentGrowthEstimate {
  int r = 0;
  double lambda_hat = 0;
  std::vector<std::pair<double, double>> evidence;  // (t, E(1 + |X(t)|^r)) or (tau, worst ratio)
  std::string method;                               // "cme" | "ssa" | "tauleap"
  double base = 1;                                  // 1 + |x0|^r (1 for per-step ratios)
  bool certified = false;
};

namespace assumption_detail {

inline void finalize_certificate(MomentGrowthEstimate& est) {
  double lam = 0;
  for (auto& [t, v] : est.evidence) {
    if (t <= 0 || v <= 0) continue;
    lam = std::max(lam, std::log(v / est.base) / t);
  }
  est.lambda_hat = lam;
  est.certified = true;
  for (auto& [t, v] : est.evidence)
    if (v > est.base * std::exp(lam * t) * (1 + 1e-12)) est.certified = false;
}

}  // namespace assumption_detail

/// E(1 + |X(t)|^r) on the grid via the CME oracle. Fails when the truncation
/// loss could contaminate the moment by more than 1%.
inline MomentGrowthEstimate estimate_moment_growth_cme(const ReactionNetwork& net, const State& x0,
                                                       int r, const NormSpec& norm,
                                                       const std::vector<double>& t_grid,
                                                       const TruncationSpec& trunc) {
  if (r < 1) throw std::invalid_argument("estimate_moment_growth: r must be >= 1");
  MomentGrowthEstimate est;
  est.r = r;
  est.method = "cme";
  est.base = moment_weight(norm, x0, r);
  State corner(net.num_species());
  for (int i = 0; i < net.num_species(); ++i)
    corner[i] = std::max(std::abs(trunc.lower[i]), std::abs(trunc.upper[i]));
  const double worst_weight = moment_weight(norm, corner, r);
  const SparsePmf p0 = SparsePmf::point_mass(x0);
  for (double t : t_grid) {
    const CmeSolution sol = cme_solve(net, p0, t, trunc);
    const double value = cme_moment(sol.pmf, r, norm);
    if (sol.truncation_loss * worst_weight > 0.01 * value)
      throw TruncationError("estimate_moment_growth: truncation loss contaminates the moment");
    est.evidence.emplace_back(t, value);
  }
  assumption_detail::finalize_certificate(est);
  return est;
}

/// Same certificate from an SSA ensemble (n endpoints per grid time).
inline MomentGrowthEstimate estimate_moment_growth_ssa(const ReactionNetwork& net, const State& x0,
                                                       int r, const NormSpec& norm,
                                                       const std::vector<double>& t_grid,
                                                       std::int64_t n_samples,
                                                       std::uint64_t root_seed) {
  if (r < 1) throw std::invalid_argument("estimate_moment_growth: r must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("estimate_moment_growth: need samples");
  MomentGrowthEstimate est;
  est.r = r;
  est.method = "ssa";
  est.base = moment_weight(norm, x0, r);
  for (double t : t_grid) {
    const auto endpoints = ssa_ensemble(net, x0, t, n_samples, root_seed);
    double mean = 0;
    for (const auto& x : endpoints) mean += moment_weight(norm, x, r);
    mean /= static_cast<double>(endpoints.size());
    est.evidence.emplace_back(t, mean);
  }
  assumption_detail::finalize_certificate(est);
  return est;
}

/// Single-step growth certificate for a tau-leap kernel: the worst ratio
/// sum (1+|x'|^r) phi(tau,x,x') / (1+|x|^r) over the sampled states, per tau.
inline MomentGrowthEstimate estimate_tauleap_moment_growth(
    const TauLeapKernel& kernel, const ReactionNetwork& net, const std::vector<State>& states,
    int r, const NormSpec& norm, const std::vector<double>& tau_grid,
    double mass_tolerance = 1e-12, const TauLeapOptions& opts = {}) {
  if (r < 1) throw std::invalid_argument("estimate_tauleap_moment_growth: r must be >= 1");
  if (states.empty()) throw std::invalid_argument("estimate_tauleap_moment_growth: need states");
  MomentGrowthEstimate est;
  est.r = r;
  est.method = "tauleap";
  est.base = 1.0;
  for (double tau : tau_grid) {
    double worst = 0;
    for (const State& x : states) {
      const TransitionPmf trans = state_transition_pmf(kernel, net, x, tau, mass_tolerance, opts);
      worst = std::max(worst, cme_moment(trans.pmf, r, norm) / moment_weight(norm, x, r));
    }
    est.evidence.emplace_back(tau, worst);
  }
  assumption_detail::finalize_certificate(est);
  return est;
}

struct StepMomentSeries {
  int l = 0;
  double beta = 0;       // minimal constant with m_l <= beta (1+|x|^l) tau on the grid
  double tau_slope = 1;  // log-log slope of the worst normalized m_l over tau
  bool pass = false;
};

struct StepMomentReport {
  std::vector<StepMomentSeries> series;
  bool pass = true;
};

namespace assumption_detail {

inline double marginal_moment(const MarginalDist& m, int l) {
  switch (m.kind) {
    case CountDistribution::Kind::deterministic_zero:
      return l == 0 ? 1.0 : 0.0;
    case CountDistribution::Kind::poisson:
      return poisson_moment(m.lambda, l);
    case CountDistribution::Kind::binomial:
      return binomial_moment(m.trials, m.p, l);
  }
  return 0.0;
}

/// E(sum_j K_j)^l for independent K_j via the multinomial theorem.
inline double sum_moment(const std::vector<std::vector<double>>& moments, int l) {
  const int n = static_cast<int>(moments.size());
  if (n == 0) return l == 0 ? 1.0 : 0.0;
  // dp over reactions: dp[i] = E(partial sum)^i, updated with binomial mixing
  std::vector<double> dp(l + 1, 0.0);
  const auto binom = detail::pascal_rows(l);
  for (int i = 0; i <= l; ++i) dp[i] = moments[0][i];
  for (int j = 1; j < n; ++j) {
    std::vector<double> next(l + 1, 0.0);
    for (int i = 0; i <= l; ++i)
      for (int t = 0; t <= i; ++t) next[i] += binom[i][t] * dp[t] * moments[j][i - t];
    dp.swap(next);
  }
  return dp[l];
}

}  // namespace assumption_detail

/// Checks the linear-in-tau bound m_l(x, tau) <= beta_l (1 + |x|^l) tau for
/// the moments of the linearly bounded reaction counts, using the analytic
/// Poisson/binomial moment recursions (no sampling).
inline StepMomentReport step_moment_bound_check(const TauLeapKernel& kernel,
                                                const ReactionNetwork& net,
                                                const std::vector<int>& l_list,
                                                const std::vector<double>& tau_grid,
                                                const std::vector<State>& states,
                                                const NormSpec& norm = NormSpec::one()) {
  if (states.empty() || tau_grid.empty())
    throw std::invalid_argument("step_moment_bound_check: need states and a tau grid");
  const GrowthClassification g = classify_growth(net);
  std::vector<int> linear;
  for (int j = 0; j < net.num_reactions(); ++j)
    if (g.linearly_bounded[j]) linear.push_back(j);

  StepMomentReport report;
  for (int l : l_list) {
    if (l < 1) throw std::invalid_argument("step_moment_bound_check: orders must be >= 1");
    StepMomentSeries series;
    series.l = l;
    double worst_lo = 0, worst_hi = 0;  // normalized m_l at the extreme taus
    double tau_lo = 0, tau_hi = 0;
    for (double tau : tau_grid) {
      double worst = 0;
      for (const State& x : states) {
        if (!in_nonneg_orthant(x)) continue;
        double ml = 0;
        if (tau > 0) {
          std::vector<std::vector<double>> moments;
          for (int j : linear) {
            const MarginalDist m = kernel_marginal(kernel, net, j, x, tau);
            std::vector<double> row(l + 1);
            for (int i = 0; i <= l; ++i) row[i] = assumption_detail::marginal_moment(m, i);
            moments.push_back(std::move(row));
          }
          ml = assumption_detail::sum_moment(moments, l);
          series.beta = std::max(series.beta, ml / (moment_weight(norm, x, l) * tau));
        }
        worst = std::max(worst, ml / moment_weight(norm, x, l));
      }
      if (tau > 0) {
        if (tau_lo == 0 || tau < tau_lo) {
          tau_lo = tau;
          worst_lo = worst;
        }
        if (tau > tau_hi) {
          tau_hi = tau;
          worst_hi = worst;
        }
      }
    }
    if (worst_hi == 0.0) {
      series.tau_slope = 1.0;  // no linearly bounded firing at all; bound vacuous
      series.pass = true;
    } else if (tau_hi > tau_lo && worst_lo > 0) {
      series.tau_slope = std::log(worst_hi / worst_lo) / std::log(tau_hi / tau_lo);
      series.pass = series.tau_slope >= 0.9;
    } else {
      series.pass = std::isfinite(series.beta);
    }
    report.pass = report.pass && series.pass;
    report.series.push_back(series);
  }
  return report;
}

}  // namespace taukit
