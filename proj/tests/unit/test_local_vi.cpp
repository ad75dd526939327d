#include "../support.hpp"

#include "mpvi/fixtures.hpp"
#include "mpvi/generators.hpp"
#include "mpvi/local_vi.hpp"
#include "mpvi/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpvi;

TEST_CASE("local_vi on Fig. 1") {
  const auto result = local_vi(to_double(paper_fig1()), 1e-6);
  CHECK(result.converged);
  CHECK(std::abs(result.value - 5.005) < 1e-6);
  REQUIRE(result.per_mec.size() == 3);
  const double gains[] = {4, 5, 10};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(result.per_mec[i].w - gains[i]) < 5e-7);
    CHECK(result.per_mec[i].span < 1e-6);
  }
  CHECK(result.per_mec[0].iterations == 0);
  CHECK(result.reach.upper - result.reach.lower < 1e-6 / 20);
  CHECK(result.lower <= 5.005);
  CHECK(5.005 <= result.upper);
  CHECK(result.total_states == 6);
}

TEST_CASE("local_vi edge cases") {
  const auto fig3 = local_vi(to_double(paper_fig3(7)), 1e-6);
  CHECK(std::abs(fig3.value - 7) < 1e-6);
  CHECK(fig3.per_mec.size() == 1);

  Mdp absorbing;
  absorbing.actions = {{{"a", 3, {{0, 1.0}}}}};
  CHECK(std::abs(local_vi(absorbing, 1e-6).value - 3) < 1e-6);

  Mdp zero;
  zero.actions = {{{"a", 0, {{0, 1.0}}}}};
  const auto z = local_vi(zero, 1e-6);
  CHECK(z.value == 0);
  CHECK(z.per_mec.empty());

  CHECK_THROWS_AS(local_vi(absorbing, 0), std::invalid_argument);
  Mdp broken;
  broken.actions = {{{"a", 1, {{0, 0.5}}}}};
  CHECK_THROWS_AS(local_vi(broken, 1e-3), std::invalid_argument);
}

TEST_CASE("local_vi is deterministic and independent of the worker count") {
  const Mdp model = generate(parse_generator_spec("mec-chain:6,5"));
  LocalViOptions one;
  LocalViOptions many;
  many.workers = 4;
  const auto a = local_vi(model, 1e-6, one);
  const auto b = local_vi(model, 1e-6, many);
  const auto c = local_vi(model, 1e-6, one);
  CHECK(a.value == b.value);
  CHECK(a.value == c.value);
  REQUIRE(a.per_mec.size() == b.per_mec.size());
  for (std::size_t i = 0; i < a.per_mec.size(); ++i) CHECK(a.per_mec[i].w == b.per_mec[i].w);
  CHECK(std::abs(a.value - to_double(exact_gain(generate_exact(parse_generator_spec("mec-chain:6,5")), 1e9))) < 1e-6);
}

TEST_CASE("local_vi agrees with the oracle on random models") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const ExactMdp m = testing::random_exact_model(rng);
    const double gain = to_double(exact_gain(m));
    for (double eps : {1e-3, 1e-6}) {
      const auto result = local_vi(to_double(m), eps);
      REQUIRE(result.converged);
      CHECK(std::abs(result.value - gain) < eps);
      for (const auto& value : result.per_mec) CHECK(value.span < eps);
    }
  }
}
