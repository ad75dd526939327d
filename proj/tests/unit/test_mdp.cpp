#include "../support.hpp"

#include "mpvi/fixtures.hpp"
#include "mpvi/mdp.hpp"
#include "mpvi/mec.hpp"
#include "mpvi/oracle.hpp"

#include <doctest.h>

using namespace mpvi;

namespace {

ExactMdp single_loop(const Rational& reward) {
  ExactMdp m;
  m.actions = {{{"a", reward, {{0, 1}}}}};
  return m;
}

}  // namespace

TEST_CASE("max_reward") {
  CHECK(max_reward(paper_fig1()) == 20);
  CHECK(max_reward(single_loop(Rational(15, 2))) == Rational(15, 2));
  CHECK(max_reward(single_loop(0)) == 0);
  CHECK(all_rewards_zero(single_loop(0)));
  CHECK(max_reward(to_double(paper_fig1())) == 20.0);
}

TEST_CASE("validate catches malformed models") {
  CHECK(validate(paper_fig1()).ok());
  CHECK(validate(to_double(paper_fig3(10))).ok());

  ExactMdp empty;
  CHECK_FALSE(validate(empty).ok());

  ExactMdp m = paper_fig1();
  m.actions[0][0].successors[0].probability = Rational(1, 2);
  auto report = validate(m);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations.front().state == 0);
  CHECK(report.violations.front().message.find("sums to") != std::string::npos);

  m = paper_fig1();
  m.actions[3].clear();
  CHECK_FALSE(validate(m).ok());

  m = paper_fig1();
  m.actions[2][0].reward = -1;
  CHECK_FALSE(validate(m).ok());

  m = paper_fig1();
  m.actions[2][0].successors[1].target = 9;
  CHECK_FALSE(validate(m).ok());

  m = paper_fig1();
  m.initial = 6;
  CHECK_FALSE(validate(m).ok());

  Mdp d = to_double(paper_fig1());
  d.actions[0][0].successors[0].probability += 1e-13;
  CHECK(validate(d).ok());
  d.actions[0][0].successors[0].probability += 1e-9;
  CHECK_FALSE(validate(d).ok());
}

TEST_CASE("restrict_to_mec") {
  const ExactMdp fig1 = paper_fig1();
  const Mec b{{2, 3}, {{2, 0}, {3, 0}}};
  auto restricted = restrict_to_mec(fig1, b, 2);
  CHECK(restricted.model.num_states() == 2);
  CHECK(restricted.model.initial == 0);
  CHECK(restricted.original == std::vector<StateId>{2, 3});
  CHECK(restricted.model.actions[0][0].reward == 10);
  CHECK(restricted.model.actions[1][0].reward == 0);
  CHECK(validate(restricted.model).ok());

  const Mec a{{1}, {{1, 0}}};
  auto single = restrict_to_mec(fig1, a, 1);
  REQUIRE(single.model.num_states() == 1);
  REQUIRE(single.model.actions[0].size() == 1);
  CHECK(single.model.actions[0][0].reward == 4);
  CHECK(single.model.actions[0][0].successors.front().target == 0);

  const ExactMdp fig3 = paper_fig3(10);
  auto whole = restrict_to_mec(fig3, compute_mecs(fig3).front(), 0);
  CHECK(whole.model.actions.size() == fig3.actions.size());
  for (StateId s = 0; s < 2; ++s) {
    REQUIRE(whole.model.actions[s].size() == fig3.actions[s].size());
    for (std::size_t i = 0; i < fig3.actions[s].size(); ++i) {
      CHECK(whole.model.actions[s][i].reward == fig3.actions[s][i].reward);
      CHECK(whole.model.actions[s][i].successors.size() == fig3.actions[s][i].successors.size());
    }
  }

  CHECK_THROWS_AS(restrict_to_mec(fig1, b, 0), std::invalid_argument);
  const Mec leaky{{1}, {{1, 1}}};
  CHECK_THROWS_AS(restrict_to_mec(fig1, leaky, 1), std::invalid_argument);
}

TEST_CASE("restricting to any computed MEC yields a valid model") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng);
    for (const Mec& mec : compute_mecs(m)) {
      CHECK(validate(restrict_to_mec(m, mec, mec.states.front()).model).ok());
    }
  }
}

TEST_CASE("aperiodicity transform") {
  ExactMdp cycle;
  cycle.actions = {{{"a", 0, {{1, 1}}}}, {{"a", 10, {{0, 1}}}}};
  auto t = apply_aperiodicity_transform(cycle, Rational(1, 2));
  REQUIRE(t.actions[0][0].successors.size() == 2);
  for (StateId s = 0; s < 2; ++s) {
    for (const auto& succ : t.actions[s][0].successors) CHECK(succ.probability == Rational(1, 2));
  }

  auto loop = apply_aperiodicity_transform(single_loop(3), Rational(7, 10));
  REQUIRE(loop.actions[0][0].successors.size() == 1);
  CHECK(loop.actions[0][0].successors[0].probability == 1);

  const ExactMdp fig3 = paper_fig3(10);
  CHECK(exact_gain(fig3) == 10);
  CHECK(exact_gain(apply_aperiodicity_transform(fig3, Rational(19, 20))) == 10);

  CHECK_THROWS_AS(apply_aperiodicity_transform(fig3, Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(apply_aperiodicity_transform(fig3, Rational(1)), std::invalid_argument);
  CHECK_THROWS_AS(apply_aperiodicity_transform(to_double(fig3), 1.5), std::invalid_argument);
}

TEST_CASE("aperiodicity transform preserves the exact gain") {
  std::mt19937_64 rng(5);
  testing::RandomModelShape shape;
  shape.max_states = 6;
  for (int trial = 0; trial < 60; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng, shape);
    const Rational tau = testing::ratio(static_cast<long>(rng() % 9 + 1), 10);
    CHECK(exact_gain(m) == exact_gain(apply_aperiodicity_transform(m, tau)));
  }
}

TEST_CASE("induced_chain") {
  const Rational alpha = 10;
  auto chain = induced_chain(paper_fig3(alpha), PositionalStrategy{{1, 0}});
  CHECK(chain.rewards == std::vector<Rational>{Rational(9), alpha});
  CHECK(chain.transitions[0].size() == 1);
  CHECK(chain.transitions[0][0].target == 0);
  CHECK(chain.transitions[1][0].target == 1);

  const ExactMdp fig1 = paper_fig1();
  auto all_a = induced_chain(fig1, PositionalStrategy{std::vector<std::uint32_t>(6, 0)});
  CHECK(chain_reach(all_a, std::vector<StateId>{2, 3}, 0) == Rational(999, 1000));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Mdp m = to_double(testing::random_exact_model(rng));
    PositionalStrategy strategy;
    for (StateId s = 0; s < m.num_states(); ++s) {
      strategy.choice.push_back(static_cast<std::uint32_t>(rng() % m.actions[s].size()));
    }
    auto c = induced_chain(m, strategy);
    for (StateId s = 0; s < m.num_states(); ++s) {
      const auto& chosen = m.actions[s][strategy.choice[s]];
      CHECK(c.rewards[s] == chosen.reward);
      REQUIRE(c.transitions[s].size() == chosen.successors.size());
      for (std::size_t i = 0; i < chosen.successors.size(); ++i) {
        CHECK(c.transitions[s][i].target == chosen.successors[i].target);
        CHECK(c.transitions[s][i].probability == chosen.successors[i].probability);
      }
    }
  }

  CHECK_THROWS_AS(induced_chain(fig1, PositionalStrategy{{0}}), std::invalid_argument);
}

TEST_CASE("exact and double conversions round-trip") {
  const ExactMdp fig1 = paper_fig1();
  const ExactMdp back = to_exact(to_double(fig1));
  CHECK(back.num_states() == fig1.num_states());
  CHECK(back.actions[2][0].successors[0].probability == Rational(1, 2));
}
