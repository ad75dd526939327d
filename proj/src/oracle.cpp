#include "mpvi/oracle.hpp"

#include "mpvi/linear_solve.hpp"
#include "mpvi/mec.hpp"

#include <algorithm>
#include <functional>

namespace mpvi {

namespace {

constexpr std::uint32_t kNone = ~std::uint32_t{0};

SupportGraph chain_graph(const RationalChain& chain) {
  SupportGraph graph;
  graph.successors.resize(chain.num_states());
  for (StateId s = 0; s < chain.num_states(); ++s) {
    std::vector<StateId> support;
    for (const auto& t : chain.transitions[s]) support.push_back(t.target);
    graph.successors[s].push_back(std::move(support));
  }
  return graph;
}

void check_chain(const RationalChain& chain) {
  if (chain.transitions.size() != chain.rewards.size()) throw std::invalid_argument("chain size mismatch");
  for (const auto& row : chain.transitions) {
    Rational sum = 0;
    for (const auto& t : row) {
      if (t.target >= chain.num_states()) throw std::invalid_argument("chain successor out of range");
      sum += t.probability;
    }
    if (sum != 1) throw std::invalid_argument("chain distribution does not sum to one");
  }
}

std::vector<std::vector<StateId>> bottom_components(const RationalChain& chain) {
  const SupportGraph graph = chain_graph(chain);
  std::vector<std::vector<char>> allowed(chain.num_states(), std::vector<char>(1, 1));
  std::uint32_t count = 0;
  const auto component = strongly_connected_components(graph, allowed, &count);
  std::vector<char> bottom(count, 1);
  for (StateId s = 0; s < chain.num_states(); ++s) {
    for (const auto& t : chain.transitions[s]) {
      if (component[t.target] != component[s]) bottom[component[s]] = 0;
    }
  }
  std::vector<std::uint32_t> slot(count, kNone);
  std::vector<std::vector<StateId>> classes;
  for (StateId s = 0; s < chain.num_states(); ++s) {
    const auto c = component[s];
    if (!bottom[c]) continue;
    if (slot[c] == kNone) {
      slot[c] = static_cast<std::uint32_t>(classes.size());
      classes.emplace_back();
    }
    classes[slot[c]].push_back(s);
  }
  return classes;
}

std::vector<Rational> stationary_distribution(const RationalChain& chain, const std::vector<StateId>& states) {
  std::vector<std::uint32_t> local(chain.num_states(), kNone);
  for (std::uint32_t i = 0; i < states.size(); ++i) local[states[i]] = i;
  const std::size_t m = states.size();
  // Balance equations pi_j = sum_i pi_i P(i, j); the first is replaced by
  // the normalization sum_i pi_i = 1.
  SparseSystem system;
  system.rows.resize(m);
  system.rhs.assign(m, 0);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (const auto& t : chain.transitions[states[i]]) {
      const std::uint32_t j = local[t.target];
      if (j != 0) system.rows[j].push_back({i, t.probability});
    }
  }
  for (std::uint32_t j = 1; j < m; ++j) {
    auto& row = system.rows[j];
    auto it = std::find_if(row.begin(), row.end(), [&](const auto& entry) { return entry.first == j; });
    if (it == row.end()) {
      row.push_back({j, Rational(-1)});
    } else {
      it->second -= 1;
    }
  }
  for (std::uint32_t i = 0; i < m; ++i) system.rows[0].push_back({i, Rational(1)});
  system.rhs[0] = 1;
  return solve_linear(system);
}

/// Solves x(s) = sum P(s, s') x(s') + rhs(s) over the states with
/// `unknown[s]`; other successors contribute `fixed[s']`.
std::vector<Rational> solve_on(const RationalChain& chain, const std::vector<char>& unknown,
                               const std::vector<Rational>& fixed) {
  std::vector<std::uint32_t> local(chain.num_states(), kNone);
  std::vector<StateId> states;
  for (StateId s = 0; s < chain.num_states(); ++s) {
    if (unknown[s]) {
      local[s] = static_cast<std::uint32_t>(states.size());
      states.push_back(s);
    }
  }
  SparseSystem system;
  system.rows.resize(states.size());
  system.rhs.assign(states.size(), 0);
  for (std::uint32_t i = 0; i < states.size(); ++i) {
    Rational diagonal = 1;
    for (const auto& t : chain.transitions[states[i]]) {
      if (!unknown[t.target]) {
        system.rhs[i] += t.probability * fixed[t.target];
      } else if (t.target == states[i]) {
        diagonal -= t.probability;
      } else {
        system.rows[i].push_back({local[t.target], -t.probability});
      }
    }
    system.rows[i].push_back({i, diagonal});
  }
  const auto solution = solve_linear(system);
  std::vector<Rational> x = fixed;
  for (std::uint32_t i = 0; i < states.size(); ++i) x[states[i]] = solution[i];
  return x;
}

std::vector<char> reachable_from(const RationalChain& chain, StateId init) {
  std::vector<char> seen(chain.num_states(), 0);
  std::vector<StateId> stack{init};
  seen[init] = 1;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const auto& t : chain.transitions[s]) {
      if (!seen[t.target]) {
        seen[t.target] = 1;
        stack.push_back(t.target);
      }
    }
  }
  return seen;
}

/// The sub-chain on the states reachable from `init`; `init` becomes state 0.
RationalChain reachable_subchain(const RationalChain& chain, StateId init, std::vector<StateId>* original = nullptr) {
  const auto seen = reachable_from(chain, init);
  std::vector<std::uint32_t> local(chain.num_states(), kNone);
  std::vector<StateId> states{init};
  local[init] = 0;
  for (StateId s = 0; s < chain.num_states(); ++s) {
    if (seen[s] && s != init) {
      local[s] = static_cast<std::uint32_t>(states.size());
      states.push_back(s);
    }
  }
  RationalChain sub;
  for (StateId s : states) {
    sub.rewards.push_back(chain.rewards[s]);
    auto row = chain.transitions[s];
    for (auto& t : row) t.target = local[t.target];
    sub.transitions.push_back(std::move(row));
  }
  if (original) *original = std::move(states);
  return sub;
}

/// Calls `visit` once per positional strategy that differs on states
/// reachable from the initial state. States in `stop` are never expanded.
/// Unreachable states keep action 0.
void for_each_strategy(const ExactMdp& mdp, const std::vector<char>& stop, double limit,
                       const std::function<void(const PositionalStrategy&)>& visit) {
  if (strategy_space_size(mdp, limit * 2) > limit) {
    throw OracleOverflow("strategy space exceeds the enumeration limit");
  }
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.actions[s].empty()) throw std::invalid_argument("state without actions");
  }
  PositionalStrategy strategy;
  strategy.choice.assign(mdp.num_states(), 0);
  std::vector<char> discovered(mdp.num_states(), 0);
  std::vector<StateId> order{mdp.initial};
  discovered[mdp.initial] = 1;

  std::function<void(std::size_t)> descend = [&](std::size_t position) {
    if (position == order.size()) {
      visit(strategy);
      return;
    }
    const StateId s = order[position];
    if (stop[s]) {
      descend(position + 1);
      return;
    }
    for (std::uint32_t a = 0; a < mdp.actions[s].size(); ++a) {
      strategy.choice[s] = a;
      const std::size_t mark = order.size();
      for (const auto& t : mdp.actions[s][a].successors) {
        if (!discovered[t.target]) {
          discovered[t.target] = 1;
          order.push_back(t.target);
        }
      }
      descend(position + 1);
      for (std::size_t i = mark; i < order.size(); ++i) discovered[order[i]] = 0;
      order.resize(mark);
    }
    strategy.choice[s] = 0;
  };
  descend(0);
}

}  // namespace

ChainAnalysis analyze_chain(const RationalChain& chain) {
  check_chain(chain);
  ChainAnalysis analysis;
  analysis.recurrent_classes = bottom_components(chain);
  const std::size_t n = chain.num_states();
  std::vector<char> transient(n, 1);
  for (const auto& cls : analysis.recurrent_classes) {
    for (StateId s : cls) transient[s] = 0;
    analysis.stationary.push_back(stationary_distribution(chain, cls));
  }
  analysis.absorption.assign(n, std::vector<Rational>(analysis.recurrent_classes.size()));
  for (std::size_t c = 0; c < analysis.recurrent_classes.size(); ++c) {
    std::vector<Rational> fixed(n, 0);
    for (StateId s : analysis.recurrent_classes[c]) fixed[s] = 1;
    const auto x = solve_on(chain, transient, fixed);
    for (StateId s = 0; s < n; ++s) analysis.absorption[s][c] = x[s];
  }
  return analysis;
}

Rational class_gain(const RationalChain& chain, const std::vector<StateId>& recurrent_class,
                    const std::vector<Rational>& stationary) {
  Rational gain = 0;
  for (std::size_t i = 0; i < recurrent_class.size(); ++i) gain += stationary[i] * chain.rewards[recurrent_class[i]];
  return gain;
}

Rational chain_gain(const RationalChain& chain, StateId init) {
  check_chain(chain);
  if (init >= chain.num_states()) throw std::invalid_argument("initial state out of range");
  const RationalChain sub = reachable_subchain(chain, init);
  const auto classes = bottom_components(sub);
  std::vector<char> transient(sub.num_states(), 1);
  std::vector<Rational> fixed(sub.num_states(), 0);
  for (const auto& cls : classes) {
    const Rational gain = class_gain(sub, cls, stationary_distribution(sub, cls));
    for (StateId s : cls) {
      transient[s] = 0;
      fixed[s] = gain;
    }
  }
  if (!transient[0]) return fixed[0];
  return solve_on(sub, transient, fixed)[0];
}

Rational chain_reach(const RationalChain& chain, std::span<const StateId> target, StateId init) {
  check_chain(chain);
  const std::size_t n = chain.num_states();
  if (init >= n) throw std::invalid_argument("initial state out of range");
  std::vector<char> is_target(n, 0);
  for (StateId s : target) {
    if (s >= n) throw std::invalid_argument("target state out of range");
    is_target[s] = 1;
  }
  if (is_target[init]) return 1;

  // States reaching the target with positive probability, by backward search.
  std::vector<std::vector<StateId>> predecessors(n);
  for (StateId s = 0; s < n; ++s) {
    if (is_target[s]) continue;
    for (const auto& t : chain.transitions[s]) predecessors[t.target].push_back(s);
  }
  std::vector<char> can_reach(n, 0);
  std::vector<StateId> stack;
  for (StateId s = 0; s < n; ++s) {
    if (is_target[s]) stack.push_back(s);
  }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (StateId p : predecessors[s]) {
      if (!can_reach[p] && !is_target[p]) {
        can_reach[p] = 1;
        stack.push_back(p);
      }
    }
  }
  if (!can_reach[init]) return 0;
  std::vector<Rational> fixed(n, 0);
  for (StateId s = 0; s < n; ++s) fixed[s] = is_target[s] ? 1 : 0;
  return solve_on(chain, can_reach, fixed)[init];
}

double strategy_space_size(const ExactMdp& mdp, double cap) {
  double size = 1;
  for (const auto& state_actions : mdp.actions) {
    size *= static_cast<double>(std::max<std::size_t>(state_actions.size(), 1));
    if (size > cap) return cap;
  }
  return size;
}

Rational exact_gain(const ExactMdp& mdp, double limit) {
  if (mdp.num_states() == 0) throw std::invalid_argument("model has no states");
  std::optional<Rational> best;
  for_each_strategy(mdp, std::vector<char>(mdp.num_states(), 0), limit, [&](const PositionalStrategy& strategy) {
    Rational value = chain_gain(induced_chain(mdp, strategy), mdp.initial);
    if (!best || value > *best) best = std::move(value);
  });
  return *best;
}

Rational exact_reach(const ExactMdp& mdp, std::span<const StateId> target, double limit) {
  if (mdp.num_states() == 0) throw std::invalid_argument("model has no states");
  std::vector<char> stop(mdp.num_states(), 0);
  for (StateId s : target) {
    if (s >= mdp.num_states()) throw std::invalid_argument("target state out of range");
    stop[s] = 1;
  }
  std::optional<Rational> best;
  for_each_strategy(mdp, stop, limit, [&](const PositionalStrategy& strategy) {
    Rational value = chain_reach(induced_chain(mdp, strategy), target, mdp.initial);
    if (!best || value > *best) best = std::move(value);
  });
  return *best;
}

Rational exact_gain_by_decomposition(const ExactMdp& mdp, double limit) {
  if (mdp.num_states() == 0) throw std::invalid_argument("model has no states");
  const auto mecs = compute_mecs(mdp);
  std::vector<std::uint32_t> mec_of(mdp.num_states(), kNone);
  std::vector<Rational> mec_gain;
  for (std::uint32_t i = 0; i < mecs.size(); ++i) {
    for (StateId s : mecs[i].states) mec_of[s] = i;
    mec_gain.push_back(exact_gain(restrict_to_mec(mdp, mecs[i], mecs[i].states.front()).model, limit));
  }

  std::optional<Rational> best;
  for_each_strategy(mdp, std::vector<char>(mdp.num_states(), 0), limit, [&](const PositionalStrategy& strategy) {
    std::vector<StateId> original;
    const RationalChain chain = reachable_subchain(induced_chain(mdp, strategy), mdp.initial, &original);
    const ChainAnalysis analysis = analyze_chain(chain);
    std::vector<Rational> stay_forever(mecs.size(), 0);
    for (std::size_t c = 0; c < analysis.recurrent_classes.size(); ++c) {
      // A recurrent class of a positional strategy is an end component.
      const std::uint32_t m = mec_of[original[analysis.recurrent_classes[c].front()]];
      if (m == kNone) throw std::logic_error("recurrent class outside every MEC");
      stay_forever[m] += analysis.absorption[0][c];
    }
    Rational value = 0;
    for (std::size_t m = 0; m < mecs.size(); ++m) value += stay_forever[m] * mec_gain[m];
    if (!best || value > *best) best = std::move(value);
  });
  return *best;
}

}  // namespace mpvi
