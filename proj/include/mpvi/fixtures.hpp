#pragma once

#include "mpvi/mdp.hpp"

#include <string_view>

namespace mpvi {

/// Six states s1..s6 (indices 0..5) with three MECs: {s2} under a (reward 4),
/// {s3,s4} (gain 5) and {s5,s6} (gain 10). From s1 the optimal gain is 1001/200.
ExactMdp paper_fig1();

/// Variant in which action b of s2 moves to s1 or s4 with probability 1/2 each.
ExactMdp paper_fig1_remark_variant();

/// Two states where stopping on small changes of the iterate difference
/// stops after two steps at 0.9 * alpha although the gain is alpha.
ExactMdp paper_fig3(const Rational& alpha);

/// paper_fig1 in the text model format, with comments.
std::string_view paper_fig1_text();

}  // namespace mpvi
