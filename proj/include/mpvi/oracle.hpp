#pragma once

#include "mpvi/mdp.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace mpvi {

/// Raised when strategy enumeration would exceed its budget.
class OracleOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact long-run structure of a Markov chain.
struct ChainAnalysis {
  /// Bottom SCCs, each sorted, ordered by smallest state.
  std::vector<std::vector<StateId>> recurrent_classes;
  /// stationary[c][i] is the mass of recurrent_classes[c][i].
  std::vector<std::vector<Rational>> stationary;
  /// absorption[s][c] = P(reach class c from s); each row sums to one.
  std::vector<std::vector<Rational>> absorption;
};

ChainAnalysis analyze_chain(const RationalChain& chain);

/// Gain of a class: sum of stationary mass times reward.
Rational class_gain(const RationalChain& chain, const std::vector<StateId>& recurrent_class,
                    const std::vector<Rational>& stationary);

/// Exact long-run average reward of the chain started in `init`.
Rational chain_gain(const RationalChain& chain, StateId init);

/// Exact probability of eventually reaching `target` from `init`.
Rational chain_reach(const RationalChain& chain, std::span<const StateId> target, StateId init);

inline constexpr double kDefaultStrategyLimit = 1e6;

/// Product of the action counts, saturating at `cap`.
double strategy_space_size(const ExactMdp& mdp, double cap = 1e300);

/// Maximal gain at the initial state over positional strategies, exact.
/// Throws OracleOverflow if the product of action counts exceeds `limit`.
Rational exact_gain(const ExactMdp& mdp, double limit = kDefaultStrategyLimit);

/// Maximal probability of reaching `target` from the initial state, exact.
Rational exact_reach(const ExactMdp& mdp, std::span<const StateId> target, double limit = kDefaultStrategyLimit);

/// Second route to the optimal gain: maximize over strategies the sum over
/// MECs of P(stay in M forever) * gain(M), where gain(M) is the exact gain of
/// the MEC on its own.
Rational exact_gain_by_decomposition(const ExactMdp& mdp, double limit = kDefaultStrategyLimit);

}  // namespace mpvi
