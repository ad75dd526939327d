#include "mpvi/reach.hpp"

#include <algorithm>

namespace mpvi {

namespace {

std::vector<char> target_mask(const Mdp& model, std::span<const StateId> target) {
  std::vector<char> mask(model.num_states(), 0);
  for (StateId s : target) {
    if (s >= model.num_states()) throw std::invalid_argument("target state out of range");
    mask[s] = 1;
  }
  return mask;
}

std::vector<char> absorbing_mask(const Mdp& model) {
  std::vector<char> mask(model.num_states(), 0);
  for (StateId s = 0; s < model.num_states(); ++s) mask[s] = is_absorbing(model, s) ? 1 : 0;
  return mask;
}

void step_in_place(const Mdp& model, const std::vector<char>& is_target, const std::vector<char>& is_absorbing,
                   const ReachBounds& current, ReachBounds& next) {
  for (StateId s = 0; s < model.num_states(); ++s) {
    if (is_target[s]) {
      next.lower[s] = next.upper[s] = 1.0;
      continue;
    }
    if (is_absorbing[s]) {
      next.lower[s] = current.lower[s];
      next.upper[s] = current.upper[s];
      continue;
    }
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& action : model.actions[s]) {
      double action_lo = 0.0;
      double action_hi = 0.0;
      for (const auto& t : action.successors) {
        action_lo += t.probability * current.lower[t.target];
        action_hi += t.probability * current.upper[t.target];
      }
      lo = std::max(lo, action_lo);
      hi = std::max(hi, action_hi);
    }
    // Both sides are valid bounds; keep the tighter one so rounding never
    // breaks monotonicity.
    next.lower[s] = std::max(current.lower[s], lo);
    next.upper[s] = std::min(current.upper[s], hi);
  }
}

}  // namespace

bool is_absorbing(const Mdp& model, StateId state) {
  for (const auto& action : model.actions[state]) {
    for (const auto& t : action.successors) {
      if (t.target != state) return false;
    }
  }
  return true;
}

ReachBounds initial_reach_bounds(const Mdp& model, std::span<const StateId> target) {
  const auto is_target = target_mask(model, target);
  ReachBounds bounds;
  bounds.lower.assign(model.num_states(), 0.0);
  bounds.upper.assign(model.num_states(), 1.0);
  for (StateId s = 0; s < model.num_states(); ++s) {
    if (is_target[s]) {
      bounds.lower[s] = 1.0;
    } else if (is_absorbing(model, s)) {
      bounds.upper[s] = 0.0;
    }
  }
  return bounds;
}

ReachBounds bellman_reach_step(const Mdp& model, std::span<const StateId> target, const ReachBounds& bounds) {
  if (bounds.lower.size() != model.num_states() || bounds.upper.size() != model.num_states()) {
    throw std::invalid_argument("bound vector size mismatch");
  }
  ReachBounds next = bounds;
  step_in_place(model, target_mask(model, target), absorbing_mask(model), bounds, next);
  return next;
}

ReachResult interval_reach(const Mdp& model, std::span<const StateId> target, double precision,
                           const ReachOptions& options) {
  if (!(precision > 0)) throw std::invalid_argument("precision must be positive");
  if (target.empty()) throw std::invalid_argument("target set is empty");
  const auto is_target = target_mask(model, target);
  const auto is_absorbing = absorbing_mask(model);

  for (const Mec& mec : compute_mecs(model)) {
    const bool touches_target =
        std::any_of(mec.states.begin(), mec.states.end(), [&](StateId s) { return is_target[s] != 0; });
    const bool trivial = mec.states.size() == 1 && is_absorbing[mec.states.front()];
    if (!touches_target && !trivial) {
      throw EndComponentError("model contains a non-absorbing end component at state " +
                              std::to_string(mec.states.front()) + "; collapse end components first");
    }
  }

  ReachResult result;
  result.bounds = initial_reach_bounds(model, target);
  ReachBounds scratch = result.bounds;
  const StateId init = model.initial;
  while (result.bounds.upper[init] - result.bounds.lower[init] >= 2.0 * precision) {
    if (result.iterations >= options.max_iters) break;
    if (options.deadline && (result.iterations & 0xff) == 0 && Clock::now() >= *options.deadline) break;
    step_in_place(model, is_target, is_absorbing, result.bounds, scratch);
    std::swap(result.bounds, scratch);
    ++result.iterations;
  }
  result.lower = result.bounds.lower[init];
  result.upper = result.bounds.upper[init];
  result.converged = result.upper - result.lower < 2.0 * precision;
  result.p = 0.5 * (result.lower + result.upper);
  return result;
}

}  // namespace mpvi
