#pragma once

#include "mpvi/mdp.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mpvi::testing {

/// Canonical n / d; GMP requires canonical operands.
Rational ratio(long n, long d);

struct RandomModelShape {
  std::size_t max_states = 8;
  std::size_t max_actions = 3;
  std::size_t max_successors = 3;
  int max_half_reward = 20;  // rewards are k / 2 for k in [0, max_half_reward]
};

/// Random valid exact model: integer weights 1..4 normalized per action,
/// distinct successors, initial state 0.
ExactMdp random_exact_model(std::mt19937_64& rng, const RandomModelShape& shape = {});

/// Random model plus one extra action per state on the cycle 0 -> 1 -> ... -> 0,
/// so the result is strongly connected.
ExactMdp random_connected_model(std::mt19937_64& rng, const RandomModelShape& shape = {});

/// MECs by exhaustive search over state subsets. For a fixed subset T the
/// largest candidate action set is every action that stays in T; (T, A) is
/// an EC for some A iff it is one for that set, so checking it suffices.
/// Maximal MECs are the ECs whose state set is maximal under inclusion.
std::vector<Mec> brute_force_mecs(const ExactMdp& mdp);

/// True when some nonempty set of non-absorbing states forms an end component.
bool has_nontrivial_end_component(const ExactMdp& mdp);

}  // namespace mpvi::testing
