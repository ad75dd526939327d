#include "mpvi/fixtures.hpp"

namespace mpvi {

namespace {

ExactAction act(std::string label, const Rational& reward, std::vector<BasicTransition<Rational>> successors) {
  return {std::move(label), reward, std::move(successors)};
}

}  // namespace

ExactMdp paper_fig1() {
  const Rational half(1, 2);
  ExactMdp m;
  m.initial = 0;
  m.state_labels = {"s1", "s2", "s3", "s4", "s5", "s6"};
  m.actions = {
      {act("a", 0, {{2, Rational(999, 1000)}, {4, Rational(1, 1000)}}), act("b", 0, {{1, 1}})},
      {act("a", 4, {{1, 1}}), act("b", 5, {{3, 1}})},
      {act("a", 10, {{2, half}, {3, half}})},
      {act("a", 0, {{2, half}, {3, half}})},
      {act("a", 20, {{4, half}, {5, half}})},
      {act("a", 0, {{4, half}, {5, half}})},
  };
  return m;
}

ExactMdp paper_fig1_remark_variant() {
  ExactMdp m = paper_fig1();
  m.actions[1][1].successors = {{0, Rational(1, 2)}, {3, Rational(1, 2)}};
  return m;
}

ExactMdp paper_fig3(const Rational& alpha) {
  ExactMdp m;
  m.initial = 0;
  m.state_labels = {"s0", "s1"};
  m.actions = {
      {act("a", 0, {{0, Rational(9, 10)}, {1, Rational(1, 10)}}), act("b", Rational(9, 10) * alpha, {{0, 1}})},
      {act("a", alpha, {{1, 1}}), act("b", 0, {{0, 1}})},
  };
  return m;
}

std::string_view paper_fig1_text() {
  return R"(# Three MECs reachable from s1 (state 0).
mdp
states: 6
init: 0
0 a 0 -> 2:0.999 4:0.001
0 b 0 -> 1:1
1 a 4 -> 1:1          # MEC {s2}
1 b 5 -> 3:1
2 a 10 -> 2:1/2 3:1/2 # MEC {s3, s4}
3 a 0 -> 2:1/2 3:1/2
4 a 20 -> 4:1/2 5:1/2 # MEC {s5, s6}
5 a 0 -> 4:1/2 5:1/2
)";
}

}  // namespace mpvi
