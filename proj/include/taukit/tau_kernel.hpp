#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taukit/lattice.hpp"
#include "taukit/reaction_network.hpp"

namespace taukit {

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// (1 - e^{-a tau}) / a, continuous through a = 0.
inline double expm1_ratio(double a, double tau) {
  if (a == 0.0) return tau;
  return -std::expm1(-a * tau) / a;
}

/// State- and step-dependent count parameter (Poisson intensity or binomial
/// success probability) together with its tau-derivatives at 0. The value at
/// tau = 0 must vanish so that K = 0 almost surely at a zero step.
struct CountParam {
  std::function<double(const ReactionNetwork&, const State&, double)> value;
  std::function<double(const ReactionNetwork&, const State&, int)> deriv0;  // i >= 1
  int max_order = 64;
};

/// Per-reaction count distribution K_j; the kernel makes the K_j independent
/// conditioned on the current state (product-form count pmf).
struct CountDistribution {
  enum class Kind { poisson, binomial, deterministic_zero };
  Kind kind = Kind::deterministic_zero;
  CountParam param;                                                        // lambda or p
  std::function<Coord(const ReactionNetwork&, const State&)> trials;      // binomial only

  static CountDistribution poisson(CountParam lambda) {
    CountDistribution d;
    d.kind = Kind::poisson;
    d.param = std::move(lambda);
    return d;
  }
  static CountDistribution binomial(std::function<Coord(const ReactionNetwork&, const State&)> n,
                                    CountParam p) {
    CountDistribution d;
    d.kind = Kind::binomial;
    d.param = std::move(p);
    d.trials = std::move(n);
    return d;
  }
  static CountDistribution zero() { return CountDistribution{}; }
};

/// A tau-leap stepping rule: x' = x + nu K with per-reaction counts drawn
/// from the count distributions. Once the state leaves Z_+^N all counts are
/// zero (freeze policy), which every operation enforces centrally.
struct TauLeapKernel {
  std::string name;
  std::vector<CountDistribution> counts;  // one per reaction
};

/// Concrete marginal of K_j at a given state and step.
struct MarginalDist {
  CountDistribution::Kind kind = CountDistribution::Kind::deterministic_zero;
  double lambda = 0;   // poisson
  Coord trials = 0;    // binomial
  double p = 0;        // binomial
};

inline MarginalDist kernel_marginal(const TauLeapKernel& kernel, const ReactionNetwork& net,
                                    int j, const State& x, double tau) {
  const auto& dist = kernel.counts.at(j);
  MarginalDist m;
  m.kind = dist.kind;
  switch (dist.kind) {
    case CountDistribution::Kind::deterministic_zero:
      break;
    case CountDistribution::Kind::poisson:
      m.lambda = dist.param.value(net, x, tau);
      if (!(m.lambda >= 0) || !std::isfinite(m.lambda))
        throw KernelError(kernel.name + ": poisson intensity out of range for reaction " +
                          std::to_string(j + 1));
      break;
    case CountDistribution::Kind::binomial:
      m.trials = dist.trials(net, x);
      m.p = dist.param.value(net, x, tau);
      if (m.trials < 0 || !(m.p >= 0.0 && m.p <= 1.0))
        throw KernelError(kernel.name + ": binomial parameter out of range for reaction " +
                          std::to_string(j + 1));
      break;
  }
  return m;
}

/// Explicit tau leap: K_j ~ Poisson(a_j(x) tau), independent.
inline TauLeapKernel kernel_explicit_tau(const ReactionNetwork& net) {
  TauLeapKernel k;
  k.name = "explicit";
  for (int j = 0; j < net.num_reactions(); ++j) {
    CountParam lam;
    lam.value = [j](const ReactionNetwork& n, const State& x, double tau) {
      return propensity(n, j, x) * tau;
    };
    lam.deriv0 = [j](const ReactionNetwork& n, const State& x, int i) {
      return i == 1 ? propensity(n, j, x) : 0.0;
    };
    k.counts.push_back(CountDistribution::poisson(std::move(lam)));
  }
  return k;
}

/// Deterministic half-step drift state x* = round(x + (tau/2) nu a(x)),
/// rounding to the nearest lattice point with ties toward x.
inline State midpoint_state(const ReactionNetwork& net, const State& x, double tau) {
  const int N = net.num_species();
  std::vector<double> drift(N, 0.0);
  for (int j = 0; j < net.num_reactions(); ++j) {
    const double a = propensity(net, j, x);
    if (a == 0.0) continue;
    for (int i = 0; i < N; ++i) drift[i] += a * static_cast<double>(net.nu(j)[i]);
  }
  State y(N);
  for (int i = 0; i < N; ++i) {
    const double v = static_cast<double>(x[i]) + 0.5 * tau * drift[i];
    const double lo = std::floor(v), hi = std::ceil(v);
    double r;
    if (v - lo < hi - v)
      r = lo;
    else if (hi - v < v - lo)
      r = hi;
    else  // tie: toward the current state
      r = (static_cast<double>(x[i]) <= v) ? lo : hi;
    y[i] = static_cast<Coord>(r);
  }
  return y;
}

/// Midpoint tau leap: K_j ~ Poisson(a_j(x*) tau). For tau below the rounding
/// threshold x* = x, so the tau-derivatives at 0 coincide with the explicit
/// kernel's.
inline TauLeapKernel kernel_midpoint_tau(const ReactionNetwork& net) {
  TauLeapKernel k;
  k.name = "midpoint";
  for (int j = 0; j < net.num_reactions(); ++j) {
    CountParam lam;
    lam.value = [j](const ReactionNetwork& n, const State& x, double tau) {
      return propensity(n, j, midpoint_state(n, x, tau)) * tau;
    };
    lam.deriv0 = [j](const ReactionNetwork& n, const State& x, int i) {
      return i == 1 ? propensity(n, j, x) : 0.0;
    };
    k.counts.push_back(CountDistribution::poisson(std::move(lam)));
  }
  return k;
}

/// Role assignment for the REMM kernel: a bimolecular pair reaction with its
/// reverse plus a birth and a death on the pair species that stays unbounded.
struct RemmRoles {
  int bimolecular = -1;  // A + B -> ..., superlinear
  int reverse = -1;      // C -> ..., the pair partner
  int birth = -1;        // B -> 2B
  int death = -1;        // B -> 0
  int species_a = -1, species_b = -1, species_c = -1;
};

namespace kernel_detail {

inline bool unit_reactants(const PropensitySpec& s, std::vector<int>& out) {
  if (s.kind != PropensitySpec::Kind::mass_action) return false;
  out.clear();
  for (auto& [sp, m] : s.reactants) {
    if (m != 1) return false;
    out.push_back(sp);
  }
  return true;
}

inline RemmRoles detect_remm_roles(const ReactionNetwork& net) {
  if (net.num_reactions() != 4)
    throw KernelError("remm: network not coverable (needs exactly 4 reactions)");
  RemmRoles roles;
  std::vector<int> rs;
  for (int j = 0; j < 4; ++j) {
    if (!unit_reactants(net.propensity_spec(j), rs))
      throw KernelError("remm: network not coverable (reaction " + std::to_string(j + 1) +
                        " is not unit-multiplicity mass action)");
    if (rs.size() == 2 && rs[0] != rs[1]) {
      if (roles.bimolecular >= 0) throw KernelError("remm: more than one bimolecular reaction");
      roles.bimolecular = j;
      roles.species_a = rs[0];
      roles.species_b = rs[1];
    }
  }
  if (roles.bimolecular < 0) throw KernelError("remm: no bimolecular reaction found");

  auto is_pure = [&](int j, int sp, Coord sign) {
    const auto& nu = net.nu(j);
    for (int i = 0; i < net.num_species(); ++i)
      if (nu[i] != (i == sp ? sign : 0)) return false;
    return true;
  };
  for (int j = 0; j < 4; ++j) {
    if (j == roles.bimolecular) continue;
    std::vector<int> r;
    unit_reactants(net.propensity_spec(j), r);
    if (r.size() != 1)
      throw KernelError("remm: network not coverable (expected single-reactant reaction)");
    const int sp = r[0];
    if ((sp == roles.species_a || sp == roles.species_b) && is_pure(j, sp, +1) &&
        roles.birth < 0) {
      roles.birth = j;
      // orient the pair so species_b is the birth/death species
      if (sp == roles.species_a) std::swap(roles.species_a, roles.species_b);
    } else if ((sp == roles.species_a || sp == roles.species_b) && is_pure(j, sp, -1) &&
               roles.death < 0) {
      roles.death = j;
      if (sp == roles.species_a) std::swap(roles.species_a, roles.species_b);
    } else if (sp != roles.species_a && sp != roles.species_b && roles.reverse < 0) {
      roles.reverse = j;
      roles.species_c = sp;
    } else {
      throw KernelError("remm: network not coverable (reaction " + std::to_string(j + 1) +
                        " fits no role)");
    }
  }
  if (roles.reverse < 0 || roles.birth < 0 || roles.death < 0)
    throw KernelError("remm: network not coverable (missing reverse/birth/death role)");

  std::vector<int> rbirth, rdeath;
  unit_reactants(net.propensity_spec(roles.birth), rbirth);
  unit_reactants(net.propensity_spec(roles.death), rdeath);
  if (rbirth[0] != roles.species_b || rdeath[0] != roles.species_b)
    throw KernelError("remm: birth and death must act on the same pair species");
  const auto& nu1 = net.nu(roles.bimolecular);
  if (nu1[roles.species_a] != -1 || nu1[roles.species_b] != -1)
    throw KernelError("remm: bimolecular reaction must consume one of each pair species");
  return roles;
}

}  // namespace kernel_detail

/// REMM tau leap for the reversible-pair + birth + death pattern:
///   K_bi    ~ Binomial(min{x_a, x_b}, p_1),
///   K_rev   ~ Binomial(x_c, p_2),
///   K_birth ~ Poisson(lambda_3),
///   K_death ~ Binomial(x_b, p_4),
/// with p_1 = c~_1/(c~_1+c_2)(1 - e^{-(c~_1+c_2) tau}), p_2 its c_2 sibling,
/// lambda_3 = (c_3 x_b / c_4)(1 - e^{-c_4 tau}), p_4 = 1 - e^{-c_4 tau}, and
/// c~_1 = (max{x_a,x_b} + [min{x_a,x_b}=0]) c_1.
inline TauLeapKernel kernel_remm_tau(const ReactionNetwork& net,
                                     std::optional<RemmRoles> roles_override = std::nullopt) {
  const RemmRoles roles =
      roles_override ? *roles_override : kernel_detail::detect_remm_roles(net);
  const double c1 = net.propensity_spec(roles.bimolecular).rate;
  const double c2 = net.propensity_spec(roles.reverse).rate;
  const double c3 = net.propensity_spec(roles.birth).rate;
  const double c4 = net.propensity_spec(roles.death).rate;
  const int sa = roles.species_a, sb = roles.species_b, sc = roles.species_c;

  auto c1_tilde = [c1, sa, sb](const State& x) {
    const Coord lo = std::min(x[sa], x[sb]);
    const Coord hi = std::max(x[sa], x[sb]);
    return (lo == 0 ? static_cast<double>(hi) + 1.0 : static_cast<double>(hi)) * c1;
  };
  // i-th derivative at 0 of c_num * (1 - e^{-a tau})/a.
  auto rate_deriv = [](double c_num, double a, int i) {
    return i < 1 ? 0.0 : c_num * (i % 2 == 1 ? 1.0 : -1.0) * std::pow(a, i - 1);
  };

  TauLeapKernel k;
  k.name = "remm";
  k.counts.resize(4);

  CountParam p1;
  p1.value = [c1_tilde, c2](const ReactionNetwork&, const State& x, double tau) {
    return c1_tilde(x) * expm1_ratio(c1_tilde(x) + c2, tau);
  };
  p1.deriv0 = [c1_tilde, c2, rate_deriv](const ReactionNetwork&, const State& x, int i) {
    return rate_deriv(c1_tilde(x), c1_tilde(x) + c2, i);
  };
  k.counts[roles.bimolecular] = CountDistribution::binomial(
      [sa, sb](const ReactionNetwork&, const State& x) {
        return std::max<Coord>(0, std::min(x[sa], x[sb]));
      },
      std::move(p1));

  CountParam p2;
  p2.value = [c1_tilde, c2](const ReactionNetwork&, const State& x, double tau) {
    return c2 * expm1_ratio(c1_tilde(x) + c2, tau);
  };
  p2.deriv0 = [c1_tilde, c2, rate_deriv](const ReactionNetwork&, const State& x, int i) {
    return rate_deriv(c2, c1_tilde(x) + c2, i);
  };
  k.counts[roles.reverse] = CountDistribution::binomial(
      [sc](const ReactionNetwork&, const State& x) { return std::max<Coord>(0, x[sc]); },
      std::move(p2));

  CountParam lam3;
  lam3.value = [c3, c4, sb](const ReactionNetwork&, const State& x, double tau) {
    return c3 * static_cast<double>(x[sb]) * expm1_ratio(c4, tau);
  };
  lam3.deriv0 = [c3, c4, sb, rate_deriv](const ReactionNetwork&, const State& x, int i) {
    return rate_deriv(c3 * static_cast<double>(x[sb]), c4, i);
  };
  k.counts[roles.birth] = CountDistribution::poisson(std::move(lam3));

  CountParam p4;
  p4.value = [c4](const ReactionNetwork&, const State&, double tau) {
    return c4 * expm1_ratio(c4, tau);
  };
  p4.deriv0 = [c4, rate_deriv](const ReactionNetwork&, const State&, int i) {
    return rate_deriv(c4, c4, i);
  };
  k.counts[roles.death] = CountDistribution::binomial(
      [sb](const ReactionNetwork&, const State& x) { return std::max<Coord>(0, x[sb]); },
      std::move(p4));

  return k;
}

/// Kernel selection for CLI/config use: "explicit" | "midpoint" | "remm".
inline TauLeapKernel kernel_by_name(const std::string& name, const ReactionNetwork& net) {
  if (name == "explicit") return kernel_explicit_tau(net);
  if (name == "midpoint") return kernel_midpoint_tau(net);
  if (name == "remm") return kernel_remm_tau(net);
  throw KernelError("unknown kernel '" + name + "' (expected explicit|midpoint|remm)");
}

}  // namespace taukit
