#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "taukit/cme.hpp"
#include "taukit/metrics.hpp"
#include "taukit/parallel.hpp"
#include "taukit/rng.hpp"
#include "taukit/ssa.hpp"
#include "test_models.hpp"

using namespace taukit;
using taukit::testing::decay_model;
using taukit::testing::pair_birth_death_model;
using taukit::testing::pure_birth_model;

namespace {

SparsePmf empirical_pmf(const std::vector<State>& samples) {
  SparsePmf p;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const auto& x : samples) p.add(x, w);
  return p;
}

}  // namespace

TEST_CASE("ssa path stays put in an absorbing state") {
  const auto net = pair_birth_death_model(1, 1, 1, 1);
  Rng rng(1);
  const auto path = ssa_simulate(net, {0, 0, 0}, 5.0, rng);
  CHECK(path.jump_times.empty());
  REQUIRE(path.states.size() == 1);
  CHECK(path.states[0] == State{0, 0, 0});
  for (auto c : path.reaction_counts) CHECK(c == 0);
}

TEST_CASE("ssa path structure: jumps are stoichiometric columns") {
  const auto net = pair_birth_death_model(0.4, 0.7, 0.5, 0.6);
  Rng rng(17);
  const auto path = ssa_simulate(net, {4, 4, 4}, 2.0, rng);
  std::vector<std::int64_t> counts(net.num_reactions(), 0);
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    CHECK(path.jump_times[i - 1] > (i >= 2 ? path.jump_times[i - 2] : 0.0));
    bool matched = false;
    for (int j = 0; j < net.num_reactions(); ++j) {
      if (path.states[i] == net.apply_reaction(path.states[i - 1], j)) {
        ++counts[j];
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }
  CHECK(counts == path.reaction_counts);
}

TEST_CASE("ssa decay waiting time has the exponential mean") {
  // X(0)=1, c=2: the single jump time is Exp(2), mean 0.5
  const auto net = decay_model(2.0);
  const std::int64_t n = 100'000;
  std::vector<double> first_jump(n, 0.0);
  parallel_for(n, [&](std::int64_t i) {
    Rng rng = Rng::stream(20240601, static_cast<std::uint64_t>(i));
    const auto path = ssa_simulate(net, {1}, 50.0, rng);
    if (path.jump_times.size() == 1) first_jump[i] = path.jump_times[0];
  });
  double mean = 0;
  for (double t : first_jump) mean += t;
  mean /= static_cast<double>(n);
  const double sigma_mean = 0.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 0.5) < 3 * sigma_mean);
}

TEST_CASE("ssa pure birth endpoint is Poisson(1) by chi-square") {
  const auto net = pure_birth_model(1.0);
  const std::int64_t n = 100'000;
  std::vector<State> endpoints = ssa_ensemble(net, {0}, 1.0, n, 77);
  // bins 0..5 plus tail, expected counts all >> 5
  const double p[6] = {0.36787944117144232, 0.36787944117144232, 0.18393972058572116,
                       0.061313240195240387, 0.015328310048810097, 0.0030656620097620193};
  const double tail = 0.000594184817581693;
  std::vector<double> observed(7, 0.0);
  for (const auto& x : endpoints) observed[std::min<Coord>(x[0], 6)] += 1.0;
  double chi2 = 0;
  for (int k = 0; k < 6; ++k) {
    const double e = n * p[k];
    chi2 += (observed[k] - e) * (observed[k] - e) / e;
  }
  const double etail = n * tail;
  chi2 += (observed[6] - etail) * (observed[6] - etail) / etail;
  CHECK(chi2 < 22.457744484825325);  // chi2 quantile at level 0.999, df = 6
}

TEST_CASE("ssa explosion guard raises") {
  const auto net = decay_model(1000.0);
  Rng rng(5);
  SsaOptions opts;
  opts.explosion_cap = 5;
  CHECK_THROWS_AS(ssa_simulate(net, {10}, 100.0, rng, opts), ExplosionError);
}

TEST_CASE("cme t=0 is the identity with zero loss") {
  const auto net = pair_birth_death_model(1, 1, 1, 1);
  SparsePmf p0;
  p0.add({1, 2, 3}, 0.25);
  p0.add({2, 2, 2}, 0.75);
  TruncationSpec trunc{{0, 0, 0}, {5, 5, 5}, 1e-10};
  const auto sol = cme_solve(net, p0, 0.0, trunc);
  CHECK(sol.truncation_loss == 0.0);
  CHECK(sol.pmf.at({1, 2, 3}) == 0.25);
  CHECK(sol.pmf.at({2, 2, 2}) == 0.75);
  CHECK(sol.pmf.support_size() == 2);
}

TEST_CASE("cme decay matches the two-state closed form to 1e-10") {
  const auto net = decay_model(1.0);
  TruncationSpec trunc{{0}, {1}, 1e-12};
  for (double t : {0.2, 0.7, 1.9}) {
    const auto sol = cme_solve(net, SparsePmf::point_mass({1}), t, trunc);
    CHECK(sol.pmf.at({1}) == doctest::Approx(std::exp(-t)).epsilon(1e-10));
    CHECK(sol.pmf.at({0}) == doctest::Approx(1.0 - std::exp(-t)).epsilon(1e-10));
    CHECK(sol.truncation_loss <= 1e-12);
  }
}

TEST_CASE("cme pure birth matches the Poisson(1) law in TV") {
  const auto net = pure_birth_model(1.0);
  TruncationSpec trunc{{0}, {30}, 1e-9};
  const auto sol = cme_solve(net, SparsePmf::point_mass({0}), 1.0, trunc);
  SparsePmf poisson;
  double pk = std::exp(-1.0);
  for (Coord k = 0; k <= 30; ++k) {
    poisson.add({k}, pk);
    pk /= static_cast<double>(k + 1);
  }
  CHECK(tv_distance(sol.pmf, poisson) < 1e-8);
  CHECK(sol.pmf.total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cme rejects unsolvable configurations") {
  const auto birth = pure_birth_model(1.0);
  TruncationSpec tiny{{0}, {3}, 1e-10};
  CHECK_THROWS_AS(cme_solve(birth, SparsePmf::point_mass({0}), 1.0, tiny), TruncationError);

  TruncationSpec box{{0}, {10}, 1e-10};
  CHECK_THROWS_AS(cme_solve(birth, SparsePmf::point_mass({11}), 1.0, box), std::invalid_argument);

  const auto fast = decay_model(1e7);
  TruncationSpec wide{{0}, {200}, 1e-10};
  CHECK_THROWS_AS(cme_solve(fast, SparsePmf::point_mass({200}), 10.0, wide), std::domain_error);
}

TEST_CASE("cme semigroup property within summed losses") {
  const auto net = pair_birth_death_model(0.3, 0.5, 0.4, 0.6);
  TruncationSpec trunc{{0, 0, 0}, {6, 25, 10}, 1e-8};
  const SparsePmf p0 = SparsePmf::point_mass({2, 3, 2});
  const auto once = cme_solve(net, p0, 0.8, trunc);
  const auto first = cme_solve(net, p0, 0.5, trunc);
  const auto second = cme_solve(net, first.pmf, 0.3, trunc);
  const double allowed =
      2 * (once.truncation_loss + first.truncation_loss + second.truncation_loss) + 1e-12;
  CHECK(tv_distance(once.pmf, second.pmf) <= allowed);
}

TEST_CASE("enlarging the box never increases the loss") {
  const auto net = pure_birth_model(1.0);
  const SparsePmf p0 = SparsePmf::point_mass({0});
  double prev = 1;
  for (Coord upper : {8, 12, 16, 25}) {
    TruncationSpec trunc{{0}, {upper}, 0.5};
    const auto sol = cme_solve(net, p0, 1.0, trunc);
    CHECK(sol.truncation_loss <= prev + 1e-15);
    prev = sol.truncation_loss;
  }
}

TEST_CASE("ssa ensemble agrees with the cme in TV") {
  const auto net = pair_birth_death_model(0.2, 0.6, 0.3, 0.5);
  const State x0 = {3, 3, 3};
  const double T = 0.4;
  TruncationSpec trunc{{0, 0, 0}, {6, 25, 9}, 1e-9};
  const auto sol = cme_solve(net, SparsePmf::point_mass(x0), T, trunc);
  const std::int64_t n = 20'000;
  const auto emp = empirical_pmf(ssa_ensemble(net, x0, T, n, 1234));
  std::size_t support = 0;
  for (auto& [x, w] : sol.pmf.entries())
    if (w > 1e-12) ++support;
  const double tol =
      2 * std::sqrt(static_cast<double>(support) / static_cast<double>(n)) + sol.truncation_loss;
  CHECK(tv_distance(emp, sol.pmf) < tol);
}

TEST_CASE("cme_moment values") {
  SparsePmf d0 = SparsePmf::point_mass({0, 0});
  CHECK(cme_moment(d0, 5, NormSpec::one()) == 1.0);
  SparsePmf dx = SparsePmf::point_mass({2});
  CHECK(cme_moment(dx, 3, NormSpec::one()) == 9.0);

  const auto net = pure_birth_model(1.0);
  TruncationSpec trunc{{0}, {30}, 1e-9};
  const auto sol = cme_solve(net, SparsePmf::point_mass({0}), 1.0, trunc);
  CHECK(cme_moment(sol.pmf, 1, NormSpec::one()) == doctest::Approx(2.0).epsilon(1e-8));
}
