#pragma once

#include "mpvi/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace mpvi {

using StateId = std::uint32_t;

template <class Scalar>
struct BasicTransition {
  StateId target = 0;
  Scalar probability{};
};

/// One available action of a state: reward and sparse successor distribution.
template <class Scalar>
struct BasicAction {
  std::string label;
  Scalar reward{};
  std::vector<BasicTransition<Scalar>> successors;
};

/// Explicit-state MDP. States and actions are dense indices; an action is
/// identified by the pair (state, index into actions[state]), so actions are
/// unique per state without a global action set.
template <class Scalar>
struct BasicMdp {
  StateId initial = 0;
  std::vector<std::vector<BasicAction<Scalar>>> actions;
  std::vector<std::string> state_labels;  // empty, or one per state

  std::size_t num_states() const { return actions.size(); }
};

using Transition = BasicTransition<double>;
using Action = BasicAction<double>;
using Mdp = BasicMdp<double>;
using ExactAction = BasicAction<Rational>;
using ExactMdp = BasicMdp<Rational>;

struct ActionRef {
  StateId state = 0;
  std::uint32_t index = 0;

  auto operator<=>(const ActionRef&) const = default;
};

/// End component (T, A): `states` sorted ascending, `actions` sorted.
struct Mec {
  std::vector<StateId> states;
  std::vector<ActionRef> actions;

  bool operator==(const Mec&) const = default;
};

struct PositionalStrategy {
  std::vector<std::uint32_t> choice;
};

template <class Scalar>
struct BasicMarkovChain {
  std::vector<Scalar> rewards;
  std::vector<std::vector<BasicTransition<Scalar>>> transitions;

  std::size_t num_states() const { return rewards.size(); }
};

using MarkovChain = BasicMarkovChain<double>;
using RationalChain = BasicMarkovChain<Rational>;

struct Violation {
  StateId state = 0;
  std::optional<std::uint32_t> action;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Absolute tolerance on distribution sums for floating-point models.
inline constexpr double kDistributionTolerance = 1e-12;

ValidationReport validate(const Mdp& mdp);
/// Exact models must have distributions summing to exactly one.
ValidationReport validate(const ExactMdp& mdp);

Mdp to_double(const ExactMdp& mdp);
ExactMdp to_exact(const Mdp& mdp);

template <class Scalar>
Scalar max_reward(const BasicMdp<Scalar>& mdp) {
  Scalar best = 0;
  for (const auto& state_actions : mdp.actions) {
    for (const auto& action : state_actions) {
      if (action.reward > best) best = action.reward;
    }
  }
  return best;
}

template <class Scalar>
bool all_rewards_zero(const BasicMdp<Scalar>& mdp) {
  return max_reward(mdp) == 0;
}

template <class Scalar>
struct RestrictedMdp {
  BasicMdp<Scalar> model;
  std::vector<StateId> original;  // restricted state -> original state
};

/// MDP restricted to an end component; states are re-packed densely in the
/// order of `mec.states` and actions keep their relative order.
template <class Scalar>
RestrictedMdp<Scalar> restrict_to_mec(const BasicMdp<Scalar>& mdp, const Mec& mec, StateId init) {
  constexpr StateId kOutside = ~StateId{0};
  std::vector<StateId> local(mdp.num_states(), kOutside);
  for (std::size_t i = 0; i < mec.states.size(); ++i) {
    if (mec.states[i] >= mdp.num_states()) throw std::invalid_argument("end component state out of range");
    local[mec.states[i]] = static_cast<StateId>(i);
  }
  if (init >= mdp.num_states() || local[init] == kOutside) {
    throw std::invalid_argument("initial state of restriction is not in the end component");
  }

  RestrictedMdp<Scalar> result;
  result.original = mec.states;
  result.model.initial = local[init];
  result.model.actions.resize(mec.states.size());
  if (!mdp.state_labels.empty()) {
    for (StateId s : mec.states) result.model.state_labels.push_back(mdp.state_labels[s]);
  }
  for (const ActionRef& ref : mec.actions) {
    if (ref.state >= mdp.num_states() || local[ref.state] == kOutside ||
        ref.index >= mdp.actions[ref.state].size()) {
      throw std::invalid_argument("end component action does not belong to its states");
    }
    const auto& action = mdp.actions[ref.state][ref.index];
    BasicAction<Scalar> copy{action.label, action.reward, {}};
    for (const auto& t : action.successors) {
      if (local[t.target] == kOutside) {
        throw std::invalid_argument("end component action '" + action.label + "' leaves the component");
      }
      copy.successors.push_back({local[t.target], t.probability});
    }
    result.model.actions[local[ref.state]].push_back(std::move(copy));
  }
  return result;
}

/// Mixes every distribution with a self-loop: (1 - tau) * [self] + tau * dist.
/// Rewards are kept, which preserves the gain of every state.
template <class Scalar>
BasicMdp<Scalar> apply_aperiodicity_transform(const BasicMdp<Scalar>& mdp, const Scalar& tau) {
  if (!(tau > 0) || !(tau < 1)) throw std::invalid_argument("aperiodicity parameter must lie in (0, 1)");
  BasicMdp<Scalar> result = mdp;
  const Scalar stay = Scalar(1) - tau;
  for (StateId s = 0; s < result.num_states(); ++s) {
    for (auto& action : result.actions[s]) {
      bool has_self = false;
      for (auto& t : action.successors) {
        Scalar scaled = tau * t.probability;
        if (t.target == s) {
          scaled += stay;
          has_self = true;
        }
        t.probability = scaled;
      }
      if (!has_self) action.successors.push_back({s, stay});
    }
  }
  return result;
}

template <class Scalar>
BasicMarkovChain<Scalar> induced_chain(const BasicMdp<Scalar>& mdp, const PositionalStrategy& strategy) {
  if (strategy.choice.size() != mdp.num_states()) throw std::invalid_argument("strategy size mismatch");
  BasicMarkovChain<Scalar> chain;
  chain.rewards.reserve(mdp.num_states());
  chain.transitions.reserve(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (strategy.choice[s] >= mdp.actions[s].size()) throw std::invalid_argument("strategy picks unavailable action");
    const auto& action = mdp.actions[s][strategy.choice[s]];
    chain.rewards.push_back(action.reward);
    chain.transitions.push_back(action.successors);
  }
  return chain;
}

}  // namespace mpvi
