#include "mpvi/mdp.hpp"

#include <cmath>
#include <unordered_set>

namespace mpvi {

namespace {

template <class Scalar, class SumCheck>
ValidationReport validate_impl(const BasicMdp<Scalar>& mdp, SumCheck&& sum_ok) {
  ValidationReport report;
  auto add = [&](StateId s, std::optional<std::uint32_t> a, std::string message) {
    report.violations.push_back({s, a, std::move(message)});
  };

  if (mdp.num_states() == 0) {
    add(0, std::nullopt, "model has no states");
    return report;
  }
  if (mdp.initial >= mdp.num_states()) add(mdp.initial, std::nullopt, "initial state out of range");
  if (!mdp.state_labels.empty() && mdp.state_labels.size() != mdp.num_states()) {
    add(0, std::nullopt, "state label count does not match state count");
  }

  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto& state_actions = mdp.actions[s];
    if (state_actions.empty()) add(s, std::nullopt, "state has no available actions");
    for (std::uint32_t a = 0; a < state_actions.size(); ++a) {
      const auto& action = state_actions[a];
      if (action.reward < 0) add(s, a, "negative reward");
      if (action.successors.empty()) {
        add(s, a, "empty distribution");
        continue;
      }
      std::unordered_set<StateId> seen;
      Scalar sum = 0;
      for (const auto& t : action.successors) {
        if (t.target >= mdp.num_states()) {
          add(s, a, "successor " + std::to_string(t.target) + " out of range");
        }
        if (!seen.insert(t.target).second) {
          add(s, a, "duplicate successor " + std::to_string(t.target));
        }
        if (!(t.probability > 0) || t.probability > 1) {
          add(s, a, "probability outside (0, 1]");
        }
        sum += t.probability;
      }
      if (auto message = sum_ok(sum); !message.empty()) add(s, a, std::move(message));
    }
  }
  return report;
}

}  // namespace

ValidationReport validate(const Mdp& mdp) {
  return validate_impl(mdp, [](double sum) -> std::string {
    if (std::abs(sum - 1.0) <= kDistributionTolerance) return {};
    return "distribution sums to " + format_double(sum);
  });
}

ValidationReport validate(const ExactMdp& mdp) {
  return validate_impl(mdp, [](const Rational& sum) -> std::string {
    if (sum == 1) return {};
    return "distribution sums to " + to_string(sum);
  });
}

Mdp to_double(const ExactMdp& mdp) {
  Mdp result;
  result.initial = mdp.initial;
  result.state_labels = mdp.state_labels;
  result.actions.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    result.actions[s].reserve(mdp.actions[s].size());
    for (const auto& action : mdp.actions[s]) {
      Action converted{action.label, to_double(action.reward), {}};
      converted.successors.reserve(action.successors.size());
      for (const auto& t : action.successors) converted.successors.push_back({t.target, to_double(t.probability)});
      result.actions[s].push_back(std::move(converted));
    }
  }
  return result;
}

ExactMdp to_exact(const Mdp& mdp) {
  ExactMdp result;
  result.initial = mdp.initial;
  result.state_labels = mdp.state_labels;
  result.actions.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (const auto& action : mdp.actions[s]) {
      ExactAction converted{action.label, from_double(action.reward), {}};
      for (const auto& t : action.successors) converted.successors.push_back({t.target, from_double(t.probability)});
      result.actions[s].push_back(std::move(converted));
    }
  }
  return result;
}

}  // namespace mpvi
