#include "../support.hpp"

#include "mpvi/fixtures.hpp"
#include "mpvi/linear_solve.hpp"
#include "mpvi/mec.hpp"
#include "mpvi/oracle.hpp"
#include "mpvi/rational.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace mpvi;

TEST_CASE("rational helpers") {
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("0.999") == Rational(999, 1000));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("2.5E1") == 25);
  CHECK(parse_rational("-3") == -3);
  CHECK_FALSE(parse_rational("1/0").has_value());
  CHECK_FALSE(parse_rational("abc").has_value());
  CHECK_FALSE(parse_rational("").has_value());
  CHECK(to_string(Rational(1001, 200)) == "1001/200");
  CHECK(to_string(Rational(4)) == "4");
  CHECK(to_double(Rational(1, 3)) == 1.0 / 3.0);
  CHECK(from_double(0.1) != Rational(1, 10));
  CHECK(to_double(from_double(0.1)) == 0.1);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.005) == "5.005");
}

TEST_CASE("linear solvers agree") {
  std::mt19937_64 rng(13);
  for (std::size_t n : {1u, 3u, 10u, 80u}) {
    SparseSystem system;
    system.rows.resize(n);
    std::vector<Rational> x;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(testing::ratio(static_cast<long>(rng() % 21) - 10, static_cast<long>(rng() % 5 + 1)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      system.rows[i].push_back({static_cast<std::uint32_t>(i), Rational(static_cast<long>(n) + 5)});
      for (int extra = 0; extra < 3; ++extra) {
        const auto j = static_cast<std::uint32_t>(rng() % n);
        if (j == i) continue;
        bool present = false;
        for (const auto& [col, coefficient] : system.rows[i]) present |= col == j;
        if (!present) system.rows[i].push_back({j, testing::ratio(static_cast<long>(rng() % 3) + 1, 2)});
      }
      Rational b = 0;
      for (const auto& [col, coefficient] : system.rows[i]) b += coefficient * x[col];
      system.rhs.push_back(b);
    }
    CHECK(solve_dense(system) == x);
    CHECK(solve_sparse(system) == x);
    CHECK(solve_linear(system) == x);
  }
  SparseSystem singular{{{{0, 1}, {1, 1}}, {{0, 2}, {1, 2}}}, {1, 2}};
  CHECK_THROWS_AS(solve_dense(singular), SingularSystemError);
  CHECK_THROWS_AS(solve_sparse(singular), SingularSystemError);
}

TEST_CASE("chain analysis") {
  const ExactMdp fig1 = paper_fig1();
  const auto chain = induced_chain(fig1, PositionalStrategy{std::vector<std::uint32_t>(6, 0)});
  const auto analysis = analyze_chain(chain);
  REQUIRE(analysis.recurrent_classes.size() == 3);
  CHECK(analysis.recurrent_classes[1] == std::vector<StateId>{2, 3});
  CHECK(analysis.stationary[1] == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(class_gain(chain, analysis.recurrent_classes[1], analysis.stationary[1]) == 5);
  CHECK(class_gain(chain, analysis.recurrent_classes[2], analysis.stationary[2]) == 10);
  CHECK(analysis.absorption[0][1] == Rational(999, 1000));
  CHECK(analysis.absorption[0][2] == Rational(1, 1000));
  CHECK(chain_gain(chain, 0) == Rational(1001, 200));
  for (const auto& row : analysis.absorption) CHECK(std::accumulate(row.begin(), row.end(), Rational(0)) == 1);
  for (const auto& dist : analysis.stationary) CHECK(std::accumulate(dist.begin(), dist.end(), Rational(0)) == 1);

  RationalChain absorbing{{Rational(7, 2)}, {{{0, 1}}}};
  CHECK(chain_gain(absorbing, 0) == Rational(7, 2));
  RationalChain cycle{{0, 10}, {{{1, 1}}, {{0, 1}}}};
  CHECK(chain_gain(cycle, 0) == 5);
  CHECK(chain_gain(cycle, 1) == 5);
}

TEST_CASE("chain gain is invariant under relabeling") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng);
    const auto chain = induced_chain(m, PositionalStrategy{std::vector<std::uint32_t>(m.num_states(), 0)});
    std::vector<StateId> perm(m.num_states());
    std::iota(perm.begin(), perm.end(), StateId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    RationalChain relabeled;
    relabeled.rewards.resize(chain.num_states());
    relabeled.transitions.resize(chain.num_states());
    for (StateId s = 0; s < chain.num_states(); ++s) {
      relabeled.rewards[perm[s]] = chain.rewards[s];
      for (const auto& t : chain.transitions[s]) relabeled.transitions[perm[s]].push_back({perm[t.target], t.probability});
    }
    CHECK(chain_gain(chain, 0) == chain_gain(relabeled, perm[0]));
  }
}

TEST_CASE("exact gain and reachability") {
  CHECK(exact_gain(paper_fig1()) == Rational(1001, 200));
  for (long alpha : {1L, 10L, 1000L}) CHECK(exact_gain(paper_fig3(alpha)) == alpha);
  ExactMdp zero = paper_fig1();
  for (auto& actions : zero.actions) {
    for (auto& action : actions) action.reward = 0;
  }
  CHECK(exact_gain(zero) == 0);

  const ExactMdp fig1 = paper_fig1();
  CHECK(exact_reach(fig1, std::vector<StateId>{0}) == 1);
  CHECK(exact_reach(fig1, std::vector<StateId>{4}) == Rational(1, 1000));
  ExactMdp from_b = fig1;
  from_b.initial = 2;
  CHECK(exact_reach(from_b, std::vector<StateId>{0}) == 0);

  CHECK(strategy_space_size(fig1) == 4);
  CHECK_THROWS_AS(exact_gain(fig1, 3), OracleOverflow);
}

TEST_CASE("two routes to the gain agree") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 150; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng);
    CHECK(exact_gain(m) == exact_gain_by_decomposition(m));
  }
  CHECK(exact_gain_by_decomposition(paper_fig1()) == Rational(1001, 200));
}

TEST_CASE("weighted quotient identity on random models") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng);
    const Rational r_max = max_reward(m);
    if (r_max == 0) continue;
    const auto mecs = compute_mecs(m);
    std::vector<Rational> f;
    for (const Mec& mec : mecs) f.push_back(exact_gain(restrict_to_mec(m, mec, mec.states.front()).model) / r_max);
    const auto q = weighted_quotient(m, mecs, f);
    CHECK(r_max * exact_reach(q.model, std::vector<StateId>{*q.plus}) == exact_gain(m));
  }
}
