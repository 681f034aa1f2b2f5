#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "taukit/lattice.hpp"

namespace taukit {

/// One additive term of a polynomial propensity: coeff * prod_i x_i^exps[i].
struct PolynomialTerm {
  double coeff = 0.0;
  std::vector<int> exps;  // length N, exponents >= 0
};

/// Jump intensity of one reaction channel. Mass action evaluates the
/// combinatorial form c * prod_i C(x_i, m_i) where m_i is the reactant
/// multiplicity; polynomial evaluates its terms and clamps at zero.
struct PropensitySpec {
  enum class Kind { mass_action, polynomial };
  Kind kind = Kind::mass_action;
  double rate = 0.0;                                   // mass_action
  std::vector<std::pair<int, int>> reactants;          // mass_action: (species, multiplicity)
  std::vector<PolynomialTerm> terms;                   // polynomial

  static PropensitySpec mass_action(double c, std::vector<std::pair<int, int>> r) {
    if (!(c >= 0) || !std::isfinite(c))
      throw std::invalid_argument("mass_action rate must be finite and non-negative");
    PropensitySpec s;
    s.kind = Kind::mass_action;
    s.rate = c;
    s.reactants = std::move(r);
    return s;
  }
  static PropensitySpec polynomial(std::vector<PolynomialTerm> t) {
    PropensitySpec s;
    s.kind = Kind::polynomial;
    s.terms = std::move(t);
    return s;
  }

  /// Total polynomial degree (reactant order for mass action).
  int degree() const {
    if (kind == Kind::mass_action) {
      int d = 0;
      for (auto& [sp, m] : reactants) d += m;
      return d;
    }
    int d = 0;
    for (const auto& t : terms) {
      if (t.coeff == 0.0) continue;
      int td = 0;
      for (int e : t.exps) td += e;
      d = std::max(d, td);
    }
    return d;
  }
};

/// Number of distinct reactant combinations C(x, m) = x(x-1)...(x-m+1)/m!.
inline double combination_count(Coord x, int m) {
  if (m == 0) return 1.0;
  if (x < m) return 0.0;
  double v = 1.0;
  for (int i = 0; i < m; ++i) v *= static_cast<double>(x - i) / static_cast<double>(i + 1);
  return v;
}

/// A chemical reaction network: N species, M reaction channels with
/// stoichiometric columns nu_j and propensities a_j.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species, std::vector<std::vector<Coord>> nu_columns,
                  std::vector<PropensitySpec> props,
                  std::vector<std::string> reaction_ids = {})
      : species_names_(std::move(species)),
        nu_(std::move(nu_columns)),
        propensities_(std::move(props)),
        reaction_ids_(std::move(reaction_ids)) {
    if (propensities_.size() != nu_.size())
      throw std::invalid_argument("network: one propensity per reaction required");
    for (const auto& col : nu_) {
      if (col.size() != species_names_.size())
        throw std::invalid_argument("network: stoichiometric column has wrong length");
      if (std::all_of(col.begin(), col.end(), [](Coord c) { return c == 0; }))
        throw std::invalid_argument("network: reaction does not change the state");
    }
    if (reaction_ids_.empty()) {
      for (std::size_t j = 0; j < nu_.size(); ++j)
        reaction_ids_.push_back("r" + std::to_string(j + 1));
    }
  }

  int num_species() const { return static_cast<int>(species_names_.size()); }
  int num_reactions() const { return static_cast<int>(nu_.size()); }
  const std::vector<std::string>& species_names() const { return species_names_; }
  const std::vector<std::string>& reaction_ids() const { return reaction_ids_; }
  const std::vector<Coord>& nu(int j) const { return nu_.at(j); }
  const std::vector<std::vector<Coord>>& nu_columns() const { return nu_; }
  const PropensitySpec& propensity_spec(int j) const { return propensities_.at(j); }

  State apply_reaction(const State& x, int j, Coord times = 1) const {
    return add_scaled(x, nu_[j], times);
  }

 private:
  std::vector<std::string> species_names_;
  std::vector<std::vector<Coord>> nu_;  // M columns, each length N
  std::vector<PropensitySpec> propensities_;
  std::vector<std::string> reaction_ids_;
};

/// a_j(x). Total on Z^N: mass action vanishes when a needed reactant is
/// short, polynomial values are clamped at zero.
inline double propensity(const ReactionNetwork& net, int j, const State& x) {
  const auto& spec = net.propensity_spec(j);
  if (spec.kind == PropensitySpec::Kind::mass_action) {
    double v = spec.rate;
    for (auto& [sp, m] : spec.reactants) {
      v *= combination_count(x[sp], m);
      if (v == 0.0) return 0.0;
    }
    return v;
  }
  double v = 0.0;
  for (const auto& t : spec.terms) {
    double term = t.coeff;
    for (std::size_t i = 0; i < t.exps.size(); ++i)
      for (int e = 0; e < t.exps[i]; ++e) term *= static_cast<double>(x[i]);
    v += term;
  }
  return std::max(v, 0.0);
}

/// a_0(x) = sum_j a_j(x).
inline double total_propensity(const ReactionNetwork& net, const State& x) {
  double s = 0;
  for (int j = 0; j < net.num_reactions(); ++j) s += propensity(net, j, x);
  return s;
}

/// One row of the generator: rate a_j(x) toward x + nu_j, diagonal -a_0(x).
struct GeneratorRow {
  double diagonal = 0.0;
  std::vector<std::pair<State, double>> off_diagonal;  // (target, rate), zero rates omitted
};

inline GeneratorRow generator_row(const ReactionNetwork& net, const State& x) {
  GeneratorRow row;
  for (int j = 0; j < net.num_reactions(); ++j) {
    const double a = propensity(net, j, x);
    if (a > 0) {
      row.off_diagonal.emplace_back(net.apply_reaction(x, j), a);
      row.diagonal -= a;
    }
  }
  return row;
}

}  // namespace taukit
