#pragma once

#include "mpvi/mdp.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace mpvi {

/// Support structure of an MDP: successors[s][a] lists the support of
/// Delta(s, a). States with no actions are allowed (they never lie in an EC).
struct SupportGraph {
  std::vector<std::vector<std::vector<StateId>>> successors;

  std::size_t num_states() const { return successors.size(); }
};

template <class Scalar>
SupportGraph support_graph(const BasicMdp<Scalar>& mdp) {
  SupportGraph graph;
  graph.successors.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (const auto& action : mdp.actions[s]) {
      std::vector<StateId> support;
      support.reserve(action.successors.size());
      for (const auto& t : action.successors) support.push_back(t.target);
      graph.successors[s].push_back(std::move(support));
    }
  }
  return graph;
}

/// Strongly connected components (iterative Tarjan) of the graph whose
/// edges are the supports of the allowed actions. Returns the component
/// index of every state; components are numbered in reverse topological order.
std::vector<std::uint32_t> strongly_connected_components(const SupportGraph& graph,
                                                         const std::vector<std::vector<char>>& allowed,
                                                         std::uint32_t* component_count = nullptr);

/// Maximal end components by iterated SCC refinement: drop every action that
/// leaves its SCC, recompute, repeat until stable. Ordered by smallest state.
std::vector<Mec> compute_mecs(const SupportGraph& graph);

template <class Scalar>
std::vector<Mec> compute_mecs(const BasicMdp<Scalar>& mdp) {
  return compute_mecs(support_graph(mdp));
}

enum class ModelClass { kStronglyConnected, kCommunicating, kMultichain };

std::string_view to_string(ModelClass model_class);

ModelClass classify(const SupportGraph& graph);

template <class Scalar>
ModelClass classify(const BasicMdp<Scalar>& mdp) {
  return classify(support_graph(mdp));
}

enum class QuotientKind { kPlain, kWeighted, kBounded };

/// Where a quotient action came from: an original (state, action) pair, the
/// per-MEC `stay` action, or the self-loop materialized on a special state.
struct ActionOrigin {
  enum class Kind { kOriginal, kStay, kSpecialLoop };
  Kind kind = Kind::kOriginal;
  ActionRef original;
};

template <class Scalar>
struct BasicQuotient {
  BasicMdp<Scalar> model;
  QuotientKind kind = QuotientKind::kPlain;
  std::vector<Mec> collapsed;
  std::vector<StateId> representative;  // quotient state of collapsed[i]
  std::vector<StateId> state_map;       // original state -> quotient state
  std::optional<StateId> plus;
  std::optional<StateId> minus;
  std::optional<StateId> unknown;
  std::vector<std::vector<ActionOrigin>> origin;  // parallel to model.actions
};

using QuotientModel = BasicQuotient<double>;
using ExactQuotient = BasicQuotient<Rational>;

inline constexpr std::string_view kStayLabel = "stay";
inline constexpr std::string_view kLoopLabel = "loop";

namespace detail {

void check_mecs_consistent(const SupportGraph& graph, const std::vector<Mec>& mecs);

template <class Scalar, class StayBuilder>
BasicQuotient<Scalar> build_quotient(const BasicMdp<Scalar>& mdp, const std::vector<Mec>& mecs, QuotientKind kind,
                                     StayBuilder&& stay) {
  check_mecs_consistent(support_graph(mdp), mecs);

  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  const std::size_t n = mdp.num_states();
  std::vector<std::uint32_t> mec_of(n, kNone);
  std::vector<std::vector<char>> internal(n);
  for (StateId s = 0; s < n; ++s) internal[s].assign(mdp.actions[s].size(), 0);
  for (std::uint32_t i = 0; i < mecs.size(); ++i) {
    for (StateId s : mecs[i].states) mec_of[s] = i;
    for (const ActionRef& ref : mecs[i].actions) internal[ref.state][ref.index] = 1;
  }

  BasicQuotient<Scalar> q;
  q.kind = kind;
  q.collapsed = mecs;
  q.state_map.assign(n, 0);

  std::vector<StateId> transient;
  for (StateId s = 0; s < n; ++s) {
    if (mec_of[s] == kNone) transient.push_back(s);
  }
  const StateId first_collapsed = static_cast<StateId>(transient.size());
  for (std::size_t i = 0; i < transient.size(); ++i) q.state_map[transient[i]] = static_cast<StateId>(i);
  for (std::uint32_t i = 0; i < mecs.size(); ++i) {
    q.representative.push_back(first_collapsed + i);
    for (StateId s : mecs[i].states) q.state_map[s] = first_collapsed + i;
  }

  std::size_t total = transient.size() + mecs.size();
  if (kind != QuotientKind::kPlain) {
    q.plus = static_cast<StateId>(total++);
    q.minus = static_cast<StateId>(total++);
  }
  if (kind == QuotientKind::kBounded) q.unknown = static_cast<StateId>(total++);

  q.model.actions.resize(total);
  q.origin.resize(total);
  q.model.initial = q.state_map[mdp.initial];

  const bool keep_rewards = kind == QuotientKind::kPlain;
  auto add_original = [&](StateId target_state, StateId s, std::uint32_t a, bool prefix_label) {
    const auto& action = mdp.actions[s][a];
    std::map<StateId, Scalar> merged;
    for (const auto& t : action.successors) merged[q.state_map[t.target]] += t.probability;
    BasicAction<Scalar> out;
    out.label = prefix_label ? std::to_string(s) + "." + action.label : action.label;
    out.reward = keep_rewards ? action.reward : Scalar(0);
    for (auto& [target, p] : merged) out.successors.push_back({target, p});
    q.model.actions[target_state].push_back(std::move(out));
    q.origin[target_state].push_back({ActionOrigin::Kind::kOriginal, {s, a}});
  };

  for (StateId s : transient) {
    for (std::uint32_t a = 0; a < mdp.actions[s].size(); ++a) add_original(q.state_map[s], s, a, false);
  }
  for (std::uint32_t i = 0; i < mecs.size(); ++i) {
    const StateId rep = first_collapsed + i;
    for (StateId s : mecs[i].states) {
      for (std::uint32_t a = 0; a < mdp.actions[s].size(); ++a) {
        if (!internal[s][a]) add_original(rep, s, a, true);
      }
    }
    if (kind != QuotientKind::kPlain) {
      BasicAction<Scalar> stay_action{std::string(kStayLabel), Scalar(0), stay(i, q)};
      q.model.actions[rep].push_back(std::move(stay_action));
      q.origin[rep].push_back({ActionOrigin::Kind::kStay, {}});
    }
  }

  for (auto special : {q.plus, q.minus, q.unknown}) {
    if (!special) continue;
    q.model.actions[*special].push_back({std::string(kLoopLabel), Scalar(0), {{*special, Scalar(1)}}});
    q.origin[*special].push_back({ActionOrigin::Kind::kSpecialLoop, {}});
  }
  return q;
}

template <class Scalar>
void check_unit_interval(const Scalar& value, const char* what) {
  if (value < 0 || value > 1) throw std::invalid_argument(std::string(what) + " outside [0, 1]");
}

}  // namespace detail

/// MEC quotient: every MEC merged into one state keeping only MEC-leaving
/// actions. Collapsed states follow the transient states in `mecs` order.
template <class Scalar>
BasicQuotient<Scalar> mec_quotient(const BasicMdp<Scalar>& mdp, const std::vector<Mec>& mecs) {
  return detail::build_quotient(mdp, mecs, QuotientKind::kPlain,
                                [](std::uint32_t, const BasicQuotient<Scalar>&) {
                                  return std::vector<BasicTransition<Scalar>>{};
                                });
}

/// Weighted quotient: adds s+ / s- and a `stay` action at every collapsed
/// state moving to s+ with probability f[i] and to s- otherwise.
template <class Scalar>
BasicQuotient<Scalar> weighted_quotient(const BasicMdp<Scalar>& mdp, const std::vector<Mec>& mecs,
                                        const std::vector<Scalar>& f) {
  if (f.size() != mecs.size()) throw std::invalid_argument("one weight per MEC required");
  for (const auto& value : f) detail::check_unit_interval(value, "MEC weight");
  return detail::build_quotient(
      mdp, mecs, QuotientKind::kWeighted, [&](std::uint32_t i, const BasicQuotient<Scalar>& q) {
        std::vector<BasicTransition<Scalar>> dist;
        if (f[i] > 0) dist.push_back({*q.plus, f[i]});
        Scalar rest = Scalar(1) - f[i];
        if (rest > 0) dist.push_back({*q.minus, rest});
        return dist;
      });
}

/// Bounded quotient: `stay` moves to s+ w.p. lower, to s- w.p. 1 - upper and
/// to s? w.p. upper - lower. Zero-mass branches are omitted.
template <class Scalar>
BasicQuotient<Scalar> bounded_quotient(const BasicMdp<Scalar>& mdp, const std::vector<Mec>& mecs,
                                       const std::vector<Scalar>& lower, const std::vector<Scalar>& upper) {
  if (lower.size() != mecs.size() || upper.size() != mecs.size()) {
    throw std::invalid_argument("one bound pair per MEC required");
  }
  for (std::size_t i = 0; i < mecs.size(); ++i) {
    detail::check_unit_interval(lower[i], "lower bound");
    detail::check_unit_interval(upper[i], "upper bound");
    if (lower[i] > upper[i]) throw std::invalid_argument("lower bound exceeds upper bound");
  }
  return detail::build_quotient(
      mdp, mecs, QuotientKind::kBounded, [&](std::uint32_t i, const BasicQuotient<Scalar>& q) {
        std::vector<BasicTransition<Scalar>> dist;
        if (lower[i] > 0) dist.push_back({*q.plus, lower[i]});
        Scalar lose = Scalar(1) - upper[i];
        if (lose > 0) dist.push_back({*q.minus, lose});
        Scalar gap = upper[i] - lower[i];
        if (gap > 0) dist.push_back({*q.unknown, gap});
        return dist;
      });
}

}  // namespace mpvi
