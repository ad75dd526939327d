#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace mpvi::testing {
namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t low, std::size_t high) {
  return std::uniform_int_distribution<std::size_t>(low, high)(rng);
}

ExactAction random_action(std::mt19937_64& rng, std::size_t n, const RandomModelShape& shape, std::string label) {
  std::vector<StateId> states(n);
  std::iota(states.begin(), states.end(), StateId{0});
  std::shuffle(states.begin(), states.end(), rng);
  const std::size_t count = uniform(rng, 1, std::min(n, shape.max_successors));
  std::vector<StateId> targets(states.begin(), states.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(targets.begin(), targets.end());
  std::vector<long> weights;
  long total = 0;
  for (std::size_t i = 0; i < count; ++i) {
    weights.push_back(static_cast<long>(uniform(rng, 1, 4)));
    total += weights.back();
  }
  ExactAction action;
  action.label = std::move(label);
  action.reward = Rational(static_cast<long>(uniform(rng, 0, static_cast<std::size_t>(shape.max_half_reward))), 2);
  action.reward.canonicalize();
  for (std::size_t i = 0; i < count; ++i) {
    Rational p(weights[i], total);
    p.canonicalize();
    action.successors.push_back({targets[i], p});
  }
  return action;
}

/// Every state of `members` has an allowed action and the allowed actions
/// connect the members strongly.
bool strongly_connected_within(const ExactMdp& mdp, const std::vector<char>& in, const std::vector<StateId>& members) {
  const std::size_t n = mdp.num_states();
  std::vector<std::vector<StateId>> forward(n), backward(n);
  for (StateId s : members) {
    bool any = false;
    for (const auto& action : mdp.actions[s]) {
      bool closed = std::all_of(action.successors.begin(), action.successors.end(),
                                [&](const auto& t) { return in[t.target]; });
      if (!closed) continue;
      any = true;
      for (const auto& t : action.successors) {
        forward[s].push_back(t.target);
        backward[t.target].push_back(s);
      }
    }
    if (!any) return false;
  }
  auto reaches_all = [&](const std::vector<std::vector<StateId>>& edges) {
    std::vector<char> seen(n, 0);
    std::vector<StateId> stack{members.front()};
    seen[members.front()] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      StateId s = stack.back();
      stack.pop_back();
      for (StateId t : edges[s]) {
        if (!seen[t]) {
          seen[t] = 1;
          ++count;
          stack.push_back(t);
        }
      }
    }
    return count == members.size();
  };
  return reaches_all(forward) && reaches_all(backward);
}

std::vector<StateId> members_of(std::uint32_t mask, std::size_t n) {
  std::vector<StateId> members;
  for (StateId s = 0; s < n; ++s) {
    if (mask >> s & 1u) members.push_back(s);
  }
  return members;
}

}  // namespace

Rational ratio(long n, long d) {
  Rational value(n, d);
  value.canonicalize();
  return value;
}

ExactMdp random_exact_model(std::mt19937_64& rng, const RandomModelShape& shape) {
  ExactMdp mdp;
  const std::size_t n = uniform(rng, 1, shape.max_states);
  mdp.actions.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t count = uniform(rng, 1, shape.max_actions);
    for (std::size_t a = 0; a < count; ++a) {
      mdp.actions[s].push_back(random_action(rng, n, shape, std::string(1, static_cast<char>('a' + a))));
    }
  }
  return mdp;
}

ExactMdp random_connected_model(std::mt19937_64& rng, const RandomModelShape& shape) {
  RandomModelShape inner = shape;
  inner.max_actions = std::max<std::size_t>(1, shape.max_actions - 1);
  ExactMdp mdp = random_exact_model(rng, inner);
  const std::size_t n = mdp.num_states();
  for (StateId s = 0; s < n; ++s) {
    Rational reward(static_cast<long>(uniform(rng, 0, static_cast<std::size_t>(shape.max_half_reward))), 2);
    reward.canonicalize();
    mdp.actions[s].push_back({"cycle", reward, {{static_cast<StateId>((s + 1) % n), Rational(1)}}});
  }
  return mdp;
}

std::vector<Mec> brute_force_mecs(const ExactMdp& mdp) {
  const std::size_t n = mdp.num_states();
  std::vector<std::uint32_t> ec_sets;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<char> in(n, 0);
    const auto members = members_of(mask, n);
    for (StateId s : members) in[s] = 1;
    if (strongly_connected_within(mdp, in, members)) ec_sets.push_back(mask);
  }
  std::vector<Mec> result;
  for (std::uint32_t mask : ec_sets) {
    bool maximal = std::none_of(ec_sets.begin(), ec_sets.end(),
                                [&](std::uint32_t other) { return other != mask && (other & mask) == mask; });
    if (!maximal) continue;
    Mec mec;
    mec.states = members_of(mask, n);
    for (StateId s : mec.states) {
      for (std::uint32_t a = 0; a < mdp.actions[s].size(); ++a) {
        const auto& succ = mdp.actions[s][a].successors;
        if (std::all_of(succ.begin(), succ.end(), [&](const auto& t) { return mask >> t.target & 1u; })) {
          mec.actions.push_back({s, a});
        }
      }
    }
    result.push_back(std::move(mec));
  }
  std::sort(result.begin(), result.end(),
            [](const Mec& a, const Mec& b) { return a.states.front() < b.states.front(); });
  return result;
}

bool has_nontrivial_end_component(const ExactMdp& mdp) {
  for (const Mec& mec : brute_force_mecs(mdp)) {
    if (mec.states.size() > 1) return true;
    const StateId s = mec.states.front();
    const bool absorbing = std::all_of(mdp.actions[s].begin(), mdp.actions[s].end(), [&](const auto& action) {
      return action.successors.size() == 1 && action.successors.front().target == s;
    });
    if (!absorbing) return true;
  }
  return false;
}

}  // namespace mpvi::testing
