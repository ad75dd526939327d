#pragma once

#include "mpvi/mec.hpp"
#include "mpvi/vi.hpp"

#include <span>
#include <vector>

namespace mpvi {

/// Two-sided bounds on the maximal probability of reaching a target set.
struct ReachBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Raised when a reachability query meets an end component that is neither
/// absorbing nor touches the target; such models must be collapsed first.
class EndComponentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A state is absorbing when it has no actions or all its actions are pure
/// self-loops.
bool is_absorbing(const Mdp& model, StateId state);

/// lower = 1 / upper = 1 on targets; upper = 0 on absorbing non-targets;
/// lower = 0 and upper = 1 elsewhere.
ReachBounds initial_reach_bounds(const Mdp& model, std::span<const StateId> target);

/// x'(s) = max_a sum_s' P(s,a,s') x(s') on both vectors. Targets stay at 1
/// and absorbing non-targets keep their value.
ReachBounds bellman_reach_step(const Mdp& model, std::span<const StateId> target, const ReachBounds& bounds);

struct ReachOptions {
  std::size_t max_iters = 100'000'000;
  std::optional<Clock::time_point> deadline;
};

struct ReachResult {
  double p = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  std::size_t iterations = 0;
  bool converged = false;
  ReachBounds bounds;
};

/// Interval iteration from both sides until upper(init) - lower(init) <
/// 2 * precision; p is the midpoint, so |p - P_max(reach target)| < precision.
/// Throws EndComponentError when the model has an end component that could
/// trap the upper iteration.
ReachResult interval_reach(const Mdp& model, std::span<const StateId> target, double precision,
                           const ReachOptions& options = {});

inline ReachResult interval_reach(const QuotientModel& quotient, std::span<const StateId> target, double precision,
                                  const ReachOptions& options = {}) {
  return interval_reach(quotient.model, target, precision, options);
}

}  // namespace mpvi
