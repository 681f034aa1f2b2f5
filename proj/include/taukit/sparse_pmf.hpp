#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taukit/lattice.hpp"
#include "taukit/reaction_network.hpp"

namespace taukit {

/// Finite-support signed measure on Z^N. Probability vectors keep the
/// signed flag false; differences and derivative vectors set it.
class SparsePmf {
 public:
  using Map = std::unordered_map<State, double, StateHash>;

  SparsePmf() = default;
  explicit SparsePmf(bool is_signed) : is_signed_(is_signed) {}

  static SparsePmf point_mass(State x) {
    SparsePmf p;
    p.entries_[std::move(x)] = 1.0;
    return p;
  }

  bool is_signed() const { return is_signed_; }
  void mark_signed() { is_signed_ = true; }
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(const State& x, double w) {
    if (w == 0.0) return;
    auto [it, inserted] = entries_.try_emplace(x, w);
    if (!inserted) it->second += w;
  }
  void set(const State& x, double w) { entries_[x] = w; }

  double at(const State& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? 0.0 : it->second;
  }

  double total() const {
    double s = 0;
    for (auto& [x, w] : entries_) s += w;
    return s;
  }

  /// Removes entries with |w| < floor; returns the absolute mass removed.
  double prune(double floor) {
    double removed = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (std::abs(it->second) < floor) {
        removed += std::abs(it->second);
        it = entries_.erase(it);
      } else {
        ++it;
      }
    }
    return removed;
  }

  const Map& entries() const { return entries_; }

  /// Entries in lexicographic state order (deterministic iteration for
  /// serialization and order-sensitive accumulation).
  std::vector<std::pair<State, double>> sorted_entries() const {
    std::vector<std::pair<State, double>> v(entries_.begin(), entries_.end());
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    return v;
  }

  SparsePmf& scale(double c) {
    for (auto& [x, w] : entries_) w *= c;
    return *this;
  }

 private:
  Map entries_;
  bool is_signed_ = false;
};

/// p1 - p2 as a signed measure (union support, implicit zeros).
inline SparsePmf difference(const SparsePmf& p1, const SparsePmf& p2) {
  SparsePmf d(true);
  for (auto& [x, w] : p1.entries()) d.add(x, w);
  for (auto& [x, w] : p2.entries()) d.add(x, -w);
  return d;
}

/// Generator action (Q g)(y) = sum_x Q(x,y) g(x): each source state sends
/// a_j(x) g(x) toward x + nu_j and -a_0(x) g(x) onto itself.
inline SparsePmf apply_generator(const ReactionNetwork& net, const SparsePmf& g) {
  SparsePmf out(true);
  for (auto& [x, w] : g.entries()) {
    if (w == 0.0) continue;
    double a0 = 0;
    for (int j = 0; j < net.num_reactions(); ++j) {
      const double a = propensity(net, j, x);
      if (a > 0) {
        out.add(net.apply_reaction(x, j), a * w);
        a0 += a;
      }
    }
    if (a0 > 0) out.add(x, -a0 * w);
  }
  return out;
}

}  // namespace taukit
