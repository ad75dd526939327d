#pragma once

#include "mpvi/lazy_model.hpp"
#include "mpvi/mdp.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace mpvi {

/// Parametric model families, written `<family>:<p1>,<p2>`:
///
///  rare-branch:n,p   the initial state moves with probability p into an
///                    n-state MEC of low rewards and otherwise into a
///                    two-state MEC of gain 8; n + 3 states
///  mec-chain:m,k     m transient states, each entering its own k-state MEC
///                    whose first state may leave for the next transient state
///  grid:w,h          w*h cells with slippery moves N, S, E, W; strongly
///                    connected
struct GeneratorSpec {
  enum class Family { kRareBranch, kMecChain, kGrid };
  Family family = Family::kGrid;
  std::uint64_t first = 1;   // n, m or w
  std::uint64_t second = 1;  // k or h (unused by rare-branch)
  Rational probability = 0;  // p of rare-branch

  std::string to_string() const;
};

/// Throws std::invalid_argument on unknown families or bad parameters.
GeneratorSpec parse_generator_spec(std::string_view text);

std::size_t num_states(const GeneratorSpec& spec);

/// The actions of one state, computed without building the model.
std::vector<ExactAction> generated_actions(const GeneratorSpec& spec, StateId state);

Rational generated_max_reward(const GeneratorSpec& spec);

ExactMdp generate_exact(const GeneratorSpec& spec);
Mdp generate(const GeneratorSpec& spec);

/// Lazy view of a generated model; states are built when first queried.
std::unique_ptr<LazyModel> generate_lazy(const GeneratorSpec& spec);

}  // namespace mpvi
