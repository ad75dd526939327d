#include "../support.hpp"

#include "mpvi/fixtures.hpp"
#include "mpvi/mec.hpp"
#include "mpvi/oracle.hpp"
#include "mpvi/vi.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpvi;

namespace {

Mdp loop_with_reward(double reward) {
  Mdp m;
  m.actions = {{{"a", reward, {{0, 1.0}}}}};
  return m;
}

}  // namespace

TEST_CASE("vi_step on Fig. 3") {
  const double alpha = 10;
  const Mdp fig3 = to_double(paper_fig3(10));
  const ViState t0 = initial_vi_state(fig3);
  const ViState t1 = vi_step(fig3, t0);
  CHECK(t1.iteration == 1);
  CHECK(t1.values == std::vector<double>{0.9 * alpha, alpha});
  const ViState t2 = vi_step(fig3, t1);
  CHECK(t2.values == std::vector<double>{1.8 * alpha, 2 * alpha});
  CHECK(t2.delta == t1.delta);
  CHECK(t0.values == std::vector<double>{0, 0});
  CHECK(span(t2.delta) == doctest::Approx(1.0));

  const Mdp loop = loop_with_reward(5);
  ViState t = initial_vi_state(loop);
  for (int n = 1; n <= 10; ++n) {
    t = vi_step(loop, t);
    CHECK(t.values[0] == 5.0 * n);
  }
  CHECK_THROWS_AS(vi_step(loop, initial_vi_state(fig3)), std::invalid_argument);
}

TEST_CASE("span") {
  CHECK(span(std::vector<double>{1, 3, 2}) == 2);
  CHECK(span(std::vector<double>{4, 4, 4}) == 0);
  CHECK(span(std::vector<double>{9, 10}) == 1);
  CHECK_THROWS_AS(span(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("ValueIterator agrees with vi_step") {
  const Mdp fig1 = to_double(paper_fig1());
  ValueIterator iterator(fig1);
  ViState state = initial_vi_state(fig1);
  for (int n = 0; n < 20; ++n) {
    iterator.step();
    state = vi_step(fig1, state);
    for (StateId s = 0; s < fig1.num_states(); ++s) {
      CHECK(iterator.state().values[s] == doctest::Approx(state.values[s]).epsilon(1e-12));
      CHECK(iterator.state().delta[s] == doctest::Approx(state.delta[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("run_vi with the span criterion") {
  const auto single = run_vi(loop_with_reward(5), {StoppingCriterion::kSpan, 1e-6});
  CHECK(single.value == 5);
  CHECK(single.iterations == 1);
  CHECK(single.converged);
  CHECK_FALSE(single.criterion_unsound);

  for (double alpha : {10.0, 100.0, 1000.0}) {
    const auto result = run_vi(to_double(paper_fig3(Rational(static_cast<long>(alpha)))), {StoppingCriterion::kSpan, 0.1});
    CHECK(result.converged);
    CHECK(std::abs(result.value - alpha) < 0.05);
    REQUIRE(result.lower.has_value());
    CHECK(*result.lower <= alpha);
    CHECK(alpha <= *result.upper);
  }

  CHECK_THROWS_AS(run_vi(to_double(paper_fig1()), {StoppingCriterion::kSpan, 1e-6}), SolverGuardError);
  CHECK_THROWS_AS(run_vi(loop_with_reward(1), {StoppingCriterion::kSpan, 0}), std::invalid_argument);

  const auto zero = run_vi(loop_with_reward(0), {StoppingCriterion::kSpan, 1e-6});
  CHECK(zero.value == 0);
  CHECK(zero.converged);

  ViOptions capped;
  capped.max_iters = 3;
  const auto stopped = run_vi(to_double(paper_fig3(1000)), {StoppingCriterion::kSpan, 1e-12}, capped);
  CHECK_FALSE(stopped.converged);
  CHECK(stopped.iterations == 3);
}

TEST_CASE("SC2 and SC3 stop early on Fig. 3") {
  for (long alpha : {10L, 100L, 1000L}) {
    const Mdp fig3 = to_double(paper_fig3(alpha));
    for (auto tag : {StoppingCriterion::kSpanDifference, StoppingCriterion::kDeltaChange}) {
      const auto result = run_vi(fig3, {tag, 0.1});
      CHECK(result.converged);
      CHECK(result.criterion_unsound);
      CHECK(result.iterations == 2);
      CHECK(result.delta == std::vector<double>{0.9 * static_cast<double>(alpha), static_cast<double>(alpha)});
      CHECK(std::abs(result.value - static_cast<double>(alpha)) == doctest::Approx(static_cast<double>(alpha) / 10));
    }
  }
  CHECK(run_vi(to_double(paper_fig3(1000)), {StoppingCriterion::kSpanDifference, 0.1}).value == doctest::Approx(900));
}

TEST_CASE("mec_value_bounds") {
  const Mdp loop = loop_with_reward(5);
  auto [lo, hi] = mec_value_bounds(vi_step(loop, initial_vi_state(loop)), 20);
  CHECK(lo == 0.25);
  CHECK(hi == 0.25);

  const ExactMdp fig1 = paper_fig1();
  const Mdp b = to_double(restrict_to_mec(fig1, Mec{{2, 3}, {{2, 0}, {3, 0}}}, 2).model);
  auto [blo, bhi] = mec_value_bounds(vi_step(b, initial_vi_state(b)), 20);
  CHECK(blo == 0);
  CHECK(bhi == 0.5);
  CHECK(blo <= 0.25);
  CHECK(0.25 <= bhi);

  CHECK_THROWS_AS(mec_value_bounds(initial_vi_state(b), 20), std::invalid_argument);

  ValueIterator iterator(apply_aperiodicity_transform(b, 0.95));
  iterator.step();
  auto previous = mec_value_bounds(iterator.state(), 20);
  for (int n = 0; n < 200; ++n) {
    iterator.step();
    const auto current = mec_value_bounds(iterator.state(), 20);
    CHECK(current.first >= previous.first - 1e-12);
    CHECK(current.second <= previous.second + 1e-12);
    CHECK(current.first <= 0.25 + 1e-12);
    CHECK(current.second >= 0.25 - 1e-12);
    previous = current;
  }
}

TEST_CASE("ValueIterator keeps the iterate difference accurate") {
  // Totals near 1e5 would put rounding of 1e-11 into a plain difference.
  const Mdp fig3 = to_double(paper_fig3(10));
  ValueIterator iterator(apply_aperiodicity_transform(fig3, 0.95));
  for (int n = 0; n < 10'000; ++n) iterator.step();
  CHECK(iterator.state().values[1] == doctest::Approx(100'000).epsilon(1e-3));
  CHECK(span(iterator.state().delta) < 1e-13);
}

TEST_CASE("span never grows") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    ValueIterator iterator(to_double(testing::random_exact_model(rng)));
    iterator.step();
    double previous = span(iterator.state().delta);
    for (int n = 0; n < 500; ++n) {
      iterator.step();
      const double current = span(iterator.state().delta);
      CHECK(current <= previous + 1e-12);
      previous = current;
    }
  }
}

TEST_CASE("SC1 is sound on communicating models") {
  std::mt19937_64 rng(71);
  testing::RandomModelShape shape;
  shape.max_states = 6;
  for (int trial = 0; trial < 200; ++trial) {
    const ExactMdp m = testing::random_connected_model(rng, shape);
    REQUIRE(classify(m) != ModelClass::kMultichain);
    const double eps = trial % 2 == 0 ? 1e-3 : 1e-6;
    const auto result = run_vi(to_double(m), {StoppingCriterion::kSpan, eps});
    REQUIRE(result.converged);
    CHECK(std::abs(result.value - to_double(exact_gain(m))) < eps / 2);
  }
}

TEST_CASE("average of total reward approaches the gain") {
  std::mt19937_64 rng(97);
  testing::RandomModelShape shape;
  shape.max_states = 4;
  for (int trial = 0; trial < 20; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng, shape);
    const Mdp approx = to_double(m);
    ValueIterator iterator(approx);
    const double gain = to_double(exact_gain(m));
    // The error decays like 1/n; a few models need more than 10^4 steps for 1e-3.
    for (int n = 0; n < 100'000; ++n) iterator.step();
    CHECK(std::abs(iterator.state().values[approx.initial] / 100'000.0 - gain) < 1e-3);
  }
}
