#include "mpvi/vi.hpp"

#include "mpvi/mec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpvi {

namespace {

void bellman_total_reward(const Mdp& mdp, std::span<const double> previous, std::span<double> next) {
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& action : mdp.actions[s]) {
      double value = action.reward;
      for (const auto& t : action.successors) value += t.probability * previous[t.target];
      best = std::max(best, value);
    }
    next[s] = best;
  }
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double result = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) result = std::max(result, std::abs(a[i] - b[i]));
  return result;
}

}  // namespace

ViState initial_vi_state(const Mdp& mdp) {
  ViState state;
  state.values.assign(mdp.num_states(), 0.0);
  state.delta.assign(mdp.num_states(), 0.0);
  return state;
}

ViState vi_step(const Mdp& mdp, const ViState& state) {
  if (state.values.size() != mdp.num_states()) throw std::invalid_argument("value vector size mismatch");
  ViState next;
  next.values.resize(mdp.num_states());
  bellman_total_reward(mdp, state.values, next.values);
  next.delta.resize(mdp.num_states());
  for (std::size_t s = 0; s < next.values.size(); ++s) next.delta[s] = next.values[s] - state.values[s];
  next.iteration = state.iteration + 1;
  return next;
}

double span(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("span of an empty vector");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

ValueIterator::ValueIterator(Mdp model) : model_(std::move(model)), state_(initial_vi_state(model_)) {
  relative_.assign(model_.num_states(), 0.0);
  next_.resize(model_.num_states());
}

void ValueIterator::step() {
  bellman_total_reward(model_, relative_, next_);
  const double shift = next_.empty() ? 0.0 : next_[0];
  offset_ += shift;
  for (std::size_t s = 0; s < next_.size(); ++s) {
    state_.delta[s] = next_[s] - relative_[s];
    relative_[s] = next_[s] - shift;
    state_.values[s] = relative_[s] + offset_;
  }
  ++state_.iteration;
}

ViResult run_vi(const Mdp& mdp, const Criterion& criterion, const ViOptions& options) {
  if (!(criterion.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (mdp.num_states() == 0) throw std::invalid_argument("model has no states");

  ViResult result;
  result.criterion_unsound = criterion.tag != StoppingCriterion::kSpan;

  if (criterion.tag == StoppingCriterion::kSpan && classify(mdp) == ModelClass::kMultichain) {
    throw SolverGuardError("span stopping criterion requires a communicating model");
  }
  if (all_rewards_zero(mdp)) {
    result.converged = true;
    result.delta.assign(mdp.num_states(), 0.0);
    if (criterion.tag == StoppingCriterion::kSpan) result.lower = result.upper = 0.0;
    return result;
  }

  ValueIterator vi(criterion.tag == StoppingCriterion::kSpan ? apply_aperiodicity_transform(mdp, options.tau) : mdp);
  std::vector<double> previous_delta;
  double previous_span = 0.0;

  while (vi.state().iteration < options.max_iters) {
    if (options.deadline && Clock::now() >= *options.deadline) {
      result.timed_out = true;
      break;
    }
    if (criterion.tag != StoppingCriterion::kSpan) previous_delta = vi.state().delta;
    vi.step();
    const ViState& state = vi.state();
    const double current_span = span(state.delta);

    bool stop = false;
    switch (criterion.tag) {
      case StoppingCriterion::kSpan:
        stop = current_span < criterion.epsilon;
        break;
      case StoppingCriterion::kSpanDifference:
        stop = state.iteration >= 2 && previous_span - current_span < criterion.epsilon;
        break;
      case StoppingCriterion::kDeltaChange:
        stop = state.iteration >= 2 && max_abs_difference(state.delta, previous_delta) < criterion.epsilon;
        break;
    }
    previous_span = current_span;
    if (stop) {
      result.converged = true;
      break;
    }
  }

  const ViState& state = vi.state();
  result.iterations = state.iteration;
  result.delta = state.delta;
  if (state.iteration == 0) return result;

  if (criterion.tag == StoppingCriterion::kSpan) {
    auto [lo, hi] = std::minmax_element(state.delta.begin(), state.delta.end());
    result.lower = *lo;
    result.upper = *hi;
    result.value = 0.5 * (*lo + *hi);
  } else {
    result.value = state.values[mdp.initial] / static_cast<double>(state.iteration);
  }
  return result;
}

std::pair<double, double> mec_value_bounds(const ViState& state, double r_max) {
  if (state.iteration == 0) throw std::invalid_argument("value bounds need at least one iteration");
  if (!(r_max > 0)) throw std::invalid_argument("r_max must be positive");
  auto [lo, hi] = std::minmax_element(state.delta.begin(), state.delta.end());
  return {std::clamp(*lo / r_max, 0.0, 1.0), std::clamp(*hi / r_max, 0.0, 1.0)};
}

}  // namespace mpvi
