#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "taukit/model_parser.hpp"
#include "taukit/reaction_network.hpp"
#include "taukit/rng.hpp"
#include "taukit/sparse_pmf.hpp"
#include "test_models.hpp"

using namespace taukit;
using taukit::testing::decay_model;
using taukit::testing::pair_birth_death_model;

TEST_CASE("parse single decay reaction") {
  const auto net = parse_network("species A\nreaction r1: A -> 0 @ mass_action 2.0");
  CHECK(net.num_species() == 1);
  CHECK(net.num_reactions() == 1);
  CHECK(net.nu(0) == std::vector<Coord>{-1});
  CHECK(propensity(net, 0, {7}) == doctest::Approx(14.0));
}

TEST_CASE("parse pair+birth+death network recovers the stoichiometry") {
  const auto net = pair_birth_death_model(1, 1, 1, 1);
  REQUIRE(net.num_species() == 3);
  REQUIRE(net.num_reactions() == 4);
  CHECK(net.nu(0) == std::vector<Coord>{-1, -1, 1});
  CHECK(net.nu(1) == std::vector<Coord>{0, 1, -1});
  CHECK(net.nu(2) == std::vector<Coord>{0, 1, 0});
  CHECK(net.nu(3) == std::vector<Coord>{0, -1, 0});
  CHECK(net.species_names() == std::vector<std::string>{"S1", "S2", "S3"});
}

TEST_CASE("parser rejections carry line and column") {
  CHECK_THROWS_AS(parse_network("species A\nreaction r1: A -> B @ mass_action 1"), ParseError);
  try {
    parse_network("species A\nreaction r1: A -> B @ mass_action 1");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 19);
    CHECK(std::string(e.what()).find("unknown species 'B'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_network("species A\nreaction r1: A -> 0 @ mass_action -1"), ParseError);
  CHECK_THROWS_AS(parse_network("species A A"), ParseError);
  CHECK_THROWS_AS(parse_network("species A\nreaction r: A -> A @ mass_action 1"), ParseError);
  CHECK_THROWS_AS(parse_network("species A\nreaction r: A -> 0 @ bogus 1"), ParseError);
  CHECK_THROWS_AS(parse_network("species A\nreaction r A -> 0 @ mass_action 1"), ParseError);
  CHECK_THROWS_AS(parse_network(""), ParseError);
}

TEST_CASE("comments, counts and polynomial propensities parse") {
  const auto net = parse_network(
      "# two species\n"
      "species A B\n"
      "reaction dimerize: 2*A -> B @ mass_action 3.0   # C(x,2) form\n"
      "reaction drive: B -> A + B @ polynomial 0.5*A^2*B + 2.0\n");
  REQUIRE(net.num_reactions() == 2);
  CHECK(net.nu(0) == std::vector<Coord>{-2, 1});
  CHECK(net.nu(1) == std::vector<Coord>{1, 0});
  // C(5,2) = 10 combinations
  CHECK(propensity(net, 0, {5, 0}) == doctest::Approx(30.0));
  CHECK(propensity(net, 0, {1, 0}) == 0.0);
  CHECK(propensity(net, 1, {2, 3}) == doctest::Approx(0.5 * 4 * 3 + 2.0));
  // polynomial value clamps at zero
  const auto neg = parse_network("species A\nreaction r: A -> 0 @ polynomial -1.0*A");
  CHECK(propensity(neg, 0, {4}) == 0.0);
}

TEST_CASE("mass action propensity values") {
  const auto net = pair_birth_death_model(1, 1, 1, 1);
  CHECK(propensity(net, 0, {2, 3, 0}) == doctest::Approx(6.0));
  CHECK(propensity(net, 0, {0, 3, 0}) == 0.0);
  CHECK(propensity(net, 0, {-2, 3, 0}) == 0.0);  // clamped, not negative
  const auto dec = decay_model(2.0);
  CHECK(propensity(dec, 0, {5}) == doctest::Approx(10.0));
}

TEST_CASE("total propensity sums the closed forms") {
  // a = (c1 x1 x2, c2 x3, c3 x2, c4 x2) = (6, 1, 3, 3) at x = (2,3,1)
  const auto net = pair_birth_death_model(1, 1, 1, 1);
  CHECK(total_propensity(net, {2, 3, 1}) == doctest::Approx(13.0));
  CHECK(total_propensity(net, {0, 0, 0}) == 0.0);
  CHECK(total_propensity(decay_model(2.0), {5}) == doctest::Approx(10.0));
}

TEST_CASE("generator row matches the three-case definition") {
  const auto dec = decay_model(2.0);
  const auto row = generator_row(dec, {3});
  CHECK(row.diagonal == doctest::Approx(-6.0));
  REQUIRE(row.off_diagonal.size() == 1);
  CHECK(row.off_diagonal[0].first == State{2});
  CHECK(row.off_diagonal[0].second == doctest::Approx(6.0));

  const auto net = pair_birth_death_model(1, 1, 1, 1);
  const auto empty = generator_row(net, {0, 0, 0});
  CHECK(empty.diagonal == 0.0);
  CHECK(empty.off_diagonal.empty());

  const auto full = generator_row(net, {1, 1, 1});
  CHECK(full.diagonal == doctest::Approx(-4.0));
  REQUIRE(full.off_diagonal.size() == 4);
  CHECK(full.off_diagonal[0].first == State{0, 0, 2});
  CHECK(full.off_diagonal[1].first == State{1, 2, 0});
  CHECK(full.off_diagonal[2].first == State{1, 2, 1});
  CHECK(full.off_diagonal[3].first == State{1, 0, 1});
  for (auto& [target, rate] : full.off_diagonal) CHECK(rate == doctest::Approx(1.0));
}

TEST_CASE("generator diagonal equals minus total propensity exactly") {
  const auto net = pair_birth_death_model(0.37, 1.21, 0.19, 2.43);
  Rng rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    State x = {static_cast<Coord>(rng.next_u64() % 12), static_cast<Coord>(rng.next_u64() % 12),
               static_cast<Coord>(rng.next_u64() % 12)};
    CHECK(generator_row(net, x).diagonal == -total_propensity(net, x));
  }
}

TEST_CASE("apply_generator on a point mass is the generator row") {
  const auto dec = decay_model(1.5);
  const auto out = apply_generator(dec, SparsePmf::point_mass({4}));
  CHECK(out.at({3}) == doctest::Approx(6.0));
  CHECK(out.at({4}) == doctest::Approx(-6.0));
  CHECK(out.support_size() == 2);

  CHECK(apply_generator(dec, SparsePmf{}).empty());
}

TEST_CASE("apply_generator is linear and conserves mass") {
  const auto net = pair_birth_death_model(0.8, 0.3, 0.5, 0.7);
  Rng rng(7);
  auto random_pmf = [&](int support) {
    SparsePmf g(true);
    for (int i = 0; i < support; ++i) {
      State x = {static_cast<Coord>(rng.next_u64() % 8), static_cast<Coord>(rng.next_u64() % 8),
                 static_cast<Coord>(rng.next_u64() % 8)};
      g.add(x, rng.uniform() * 2 - 1);
    }
    return g;
  };
  for (int trial = 0; trial < 25; ++trial) {
    const SparsePmf g1 = random_pmf(6), g2 = random_pmf(6);
    const double a = rng.uniform() * 3 - 1, b = rng.uniform() * 3 - 1;
    SparsePmf mix(true);
    for (auto& [x, w] : g1.entries()) mix.add(x, a * w);
    for (auto& [x, w] : g2.entries()) mix.add(x, b * w);
    const SparsePmf lhs = apply_generator(net, mix);
    const SparsePmf r1 = apply_generator(net, g1), r2 = apply_generator(net, g2);
    SparsePmf rhs(true);
    for (auto& [x, w] : r1.entries()) rhs.add(x, a * w);
    for (auto& [x, w] : r2.entries()) rhs.add(x, b * w);
    for (auto& [x, w] : lhs.entries()) CHECK(w == doctest::Approx(rhs.at(x)).epsilon(1e-12));
    for (auto& [x, w] : rhs.entries()) CHECK(w == doctest::Approx(lhs.at(x)).epsilon(1e-12));
    // columns of Q sum to zero: probability flux balances
    CHECK(std::abs(lhs.total()) < 1e-10);
  }
}

TEST_CASE("uniform measure on two states mixes the generator rows") {
  const auto net = pair_birth_death_model(1, 1, 1, 1);
  const State x1 = {1, 1, 1}, x2 = {2, 0, 3};
  SparsePmf g;
  g.add(x1, 0.5);
  g.add(x2, 0.5);
  const SparsePmf out = apply_generator(net, g);
  SparsePmf expected(true);
  for (const State& x : {x1, x2}) {
    const auto row = generator_row(net, x);
    expected.add(x, 0.5 * row.diagonal);
    for (auto& [target, rate] : row.off_diagonal) expected.add(target, 0.5 * rate);
  }
  for (auto& [x, w] : expected.entries()) CHECK(out.at(x) == doctest::Approx(w));
  CHECK(out.support_size() == expected.support_size());
}

TEST_CASE("mass action growth is bounded by degree-s polynomial") {
  // a_j(x) <= alpha (|x|^s + 1) with s the total reactant order
  const auto net = pair_birth_death_model(2.0, 1.0, 3.0, 0.5);
  auto one_norm = [](const State& x) {
    double s = 0;
    for (Coord c : x) s += std::abs(static_cast<double>(c));
    return s;
  };
  const double alpha = 3.0;  // max rate; C(x,1) products are <= |x|^s
  for (Coord x1 = 0; x1 <= 20; x1 += 4)
    for (Coord x2 = 0; x2 <= 20; x2 += 4)
      for (Coord x3 = 0; x3 <= 20; x3 += 4) {
        const State x = {x1, x2, x3};
        const double nx = one_norm(x);
        CHECK(propensity(net, 0, x) <= alpha * (nx * nx + 1));
        for (int j = 1; j < 4; ++j) CHECK(propensity(net, j, x) <= alpha * (nx + 1));
      }
}
