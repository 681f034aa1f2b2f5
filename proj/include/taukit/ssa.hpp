#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "taukit/lattice.hpp"
#include "taukit/parallel.hpp"
#include "taukit/reaction_network.hpp"
#include "taukit/rng.hpp"

namespace taukit {

struct ExplosionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SsaOptions {
  std::uint64_t explosion_cap = 100'000'000;  // jumps per path
};

/// Exact sample path on [0, T]: states[0] at time 0, states[k+1] holds on
/// [jump_times[k], next jump).
struct SsaPath {
  std::vector<double> jump_times;
  std::vector<State> states;
  std::vector<std::int64_t> reaction_counts;  // per-channel firings over (0, T]
};

namespace ssa_detail {

inline int pick_channel(const ReactionNetwork& net, const State& x, double a0, Rng& rng) {
  const double target = rng.uniform() * a0;
  double cum = 0;
  int last_positive = -1;
  for (int j = 0; j < net.num_reactions(); ++j) {
    const double a = propensity(net, j, x);
    if (a > 0) last_positive = j;
    cum += a;
    if (target < cum) return j;
  }
  return last_positive;  // rounding pushed target past the final partial sum
}

}  // namespace ssa_detail

/// Gillespie direct method: exponential waiting time at rate a_0(x), channel
/// j with probability a_j(x)/a_0(x). Stops at T or at an absorbing state;
/// paths exceeding the jump cap raise ExplosionError.
inline SsaPath ssa_simulate(const ReactionNetwork& net, const State& x0, double T, Rng& rng,
                            const SsaOptions& opts = {}) {
  if (T < 0) throw std::invalid_argument("ssa_simulate: T must be >= 0");
  SsaPath path;
  path.states.push_back(x0);
  path.reaction_counts.assign(net.num_reactions(), 0);
  State x = x0;
  double t = 0;
  std::uint64_t jumps = 0;
  while (true) {
    const double a0 = total_propensity(net, x);
    if (a0 <= 0) break;
    t += rng.exponential(a0);
    if (t > T) break;
    const int j = ssa_detail::pick_channel(net, x, a0, rng);
    if (j < 0) break;
    x = net.apply_reaction(x, j);
    path.jump_times.push_back(t);
    path.states.push_back(x);
    ++path.reaction_counts[j];
    if (++jumps > opts.explosion_cap)
      throw ExplosionError("ssa_simulate: jump cap exceeded, explosion suspected");
  }
  return path;
}

/// Endpoint-only variant for ensembles.
inline State ssa_endpoint(const ReactionNetwork& net, const State& x0, double T, Rng& rng,
                          const SsaOptions& opts = {}) {
  State x = x0;
  double t = 0;
  std::uint64_t jumps = 0;
  while (true) {
    const double a0 = total_propensity(net, x);
    if (a0 <= 0) return x;
    t += rng.exponential(a0);
    if (t > T) return x;
    const int j = ssa_detail::pick_channel(net, x, a0, rng);
    if (j < 0) return x;
    x = net.apply_reaction(x, j);
    if (++jumps > opts.explosion_cap)
      throw ExplosionError("ssa_endpoint: jump cap exceeded, explosion suspected");
  }
}

/// n independent endpoints; sample i draws from Rng::stream(root_seed, i),
/// so the result is identical regardless of thread schedule.
inline std::vector<State> ssa_ensemble(const ReactionNetwork& net, const State& x0, double T,
                                       std::int64_t n, std::uint64_t root_seed,
                                       const SsaOptions& opts = {}, unsigned threads = 0) {
  std::vector<State> out(static_cast<std::size_t>(n));
  std::exception_ptr error;
  std::mutex error_mutex;
  parallel_for(
      n,
      [&](std::int64_t i) {
        try {
          Rng rng = Rng::stream(root_seed, static_cast<std::uint64_t>(i));
          out[static_cast<std::size_t>(i)] = ssa_endpoint(net, x0, T, rng, opts);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      },
      threads);
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace taukit
