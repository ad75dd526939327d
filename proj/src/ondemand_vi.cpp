#include "mpvi/ondemand_vi.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpvi {

namespace {

constexpr std::uint32_t kNoNode = ~std::uint32_t{0};
// Refinement stops at this gap; rounding in the iterate differences
// prevents meaningful progress below it.
constexpr double kGapFloor = 4 * DBL_EPSILON;
constexpr std::size_t kRefineStepCap = 1'000'000;

[[noreturn, gnu::cold, gnu::noinline]] void fail(const char* what) { throw std::logic_error(what); }

}  // namespace

struct OnDemandSolver::ActionData {
  double reward = 0.0;
  std::uint32_t first_successor = 0;
  std::uint32_t num_successors = 0;
  std::uint32_t state = 0;  // local owner
  double u = 1.0;
  double l = 0.0;
  std::uint32_t round_robin = 0;
  bool internal = false;
};

struct OnDemandSolver::StateData {
  StateId original = 0;
  NodeId node = kNoNode;
  std::uint32_t first_action = 0;
  std::uint32_t num_actions = 0;
  bool expanded = false;
};

struct OnDemandSolver::Node {
  enum class Kind { kSink, kState, kCollapsed };
  Kind kind = Kind::kState;
  bool alive = true;
  NodeId replaced_by = kNoNode;
  double upper = 1.0;
  double lower = 0.0;
  std::vector<std::uint32_t> exits;  // action ids leaving the node

  // Seed of the bound maximization. Collapsed nodes hold their stay bounds
  // here; sinks and unexplored states hold their fixed bounds with no exits;
  // expanded states hold -1 so that only exits count.
  double stay_upper = 1.0;
  double stay_lower = 0.0;

  // Collapsed nodes only.
  std::vector<std::uint32_t> members;   // local states
  std::vector<std::uint32_t> internal;  // action ids inside the component
  std::uint32_t stay_round_robin = 0;
  std::unique_ptr<ValueIterator> vi;

  // Unexpanded state nodes keep (1, 0) until expanded.
  std::uint32_t local = 0;
};

std::string_view to_string(Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::kProbability:
      return "pr";
    case Heuristic::kRoundRobin:
      return "rr";
    case Heuristic::kMaxDifference:
      return "md";
  }
  return "?";
}

std::optional<Heuristic> parse_heuristic(std::string_view text) {
  if (text == "pr") return Heuristic::kProbability;
  if (text == "rr") return Heuristic::kRoundRobin;
  if (text == "md") return Heuristic::kMaxDifference;
  return std::nullopt;
}

std::size_t appear(NodeId node, const std::vector<OnDemandSolver::Step>& path) {
  return static_cast<std::size_t>(
      std::count_if(path.begin(), path.end(), [&](const OnDemandSolver::Step& step) { return step.node == node; }));
}

OnDemandSolver::OnDemandSolver(const LazyModel& model, OnDemandOptions options)
    : model_(model), options_(std::move(options)), r_max_(model.max_reward()), rng_(options_.seed) {
  if (!(options_.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (options_.k < 2) throw std::invalid_argument("k must be at least 2");
  if (!(options_.tau > 0 && options_.tau < 1)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (r_max_ < 0) throw std::invalid_argument("negative reward bound");

  for (int i = 0; i < 3; ++i) {
    Node sink;
    sink.kind = Node::Kind::kSink;
    nodes_.push_back(std::move(sink));
    appear_.push_back(0);
  }
  nodes_[kPlus].upper = nodes_[kPlus].lower = nodes_[kPlus].stay_upper = nodes_[kPlus].stay_lower = 1.0;
  nodes_[kMinus].upper = nodes_[kMinus].lower = nodes_[kMinus].stay_upper = nodes_[kMinus].stay_lower = 0.0;

  initial_local_ = local_id(model_.initial());
  expand_local(initial_local_);
}

OnDemandSolver::~OnDemandSolver() = default;

std::uint32_t OnDemandSolver::local_id(StateId state) {
  auto [it, inserted] = local_of_.try_emplace(state, static_cast<std::uint32_t>(states_.size()));
  if (inserted) {
    StateData data;
    data.original = state;
    data.node = static_cast<NodeId>(nodes_.size());
    states_.push_back(data);
    Node node;
    node.kind = Node::Kind::kState;
    node.local = it->second;
    nodes_.push_back(std::move(node));
    appear_.push_back(0);
  }
  return it->second;
}

void OnDemandSolver::expand_local(std::uint32_t local) {
  if (states_[local].expanded) return;
  const std::vector<Action> available = model_.actions(states_[local].original);
  if (available.empty()) throw std::invalid_argument("state without actions");
  const auto first_action = static_cast<std::uint32_t>(actions_.size());
  for (const Action& action : available) {
    if (action.reward > r_max_) throw std::invalid_argument("reward exceeds the model's declared maximum");
    ActionData data;
    data.reward = action.reward;
    data.state = local;
    data.first_successor = static_cast<std::uint32_t>(successors_.size());
    data.num_successors = static_cast<std::uint32_t>(action.successors.size());
    for (const Transition& t : action.successors) {
      successors_.push_back({local_id(t.target), t.probability});
    }
    actions_.push_back(data);
  }
  StateData& state = states_[local];
  state.expanded = true;
  state.first_action = first_action;
  state.num_actions = static_cast<std::uint32_t>(available.size());
  ++explored_;
  Node& node = nodes_[state.node];
  for (std::uint32_t a = 0; a < state.num_actions; ++a) node.exits.push_back(first_action + a);
  node.stay_upper = -1.0;
  node.stay_lower = 0.0;
  refresh(state.node);
}

NodeId OnDemandSolver::expand(StateId state) {
  const std::uint32_t local = local_id(state);
  expand_local(local);
  return states_[local].node;
}

inline void OnDemandSolver::refresh(NodeId id) {
  Node& node = nodes_[id];
  // The upper bound is the best u over the choices, the lower bound the
  // best l among the choices attaining it.
  double best = node.stay_upper;
  double low = node.stay_lower;
  for (std::uint32_t a : node.exits) {
    const ActionData& action = actions_[a];
    if (action.u > best) {
      best = action.u;
      low = action.l;
    } else if (action.u == best && action.l > low) {
      low = action.l;
    }
  }
  node.upper = best;
  node.lower = std::min(low, best);
}

NodeId OnDemandSolver::resolve(NodeId id) const {
  while (!nodes_[id].alive) id = nodes_[id].replaced_by;
  return id;
}

NodeId OnDemandSolver::initial_node() const { return states_[initial_local_].node; }

std::optional<NodeId> OnDemandSolver::node_of(StateId state) const {
  auto it = local_of_.find(state);
  if (it == local_of_.end()) return std::nullopt;
  return states_[it->second].node;
}

double OnDemandSolver::upper(NodeId node) const { return nodes_.at(node).upper; }
double OnDemandSolver::lower(NodeId node) const { return nodes_.at(node).lower; }
bool OnDemandSolver::is_collapsed(NodeId node) const { return nodes_.at(node).kind == Node::Kind::kCollapsed; }
bool OnDemandSolver::is_alive(NodeId node) const { return nodes_.at(node).alive; }

std::pair<double, double> OnDemandSolver::stay_bounds(NodeId node) const {
  if (!is_collapsed(node)) throw std::invalid_argument("node is not collapsed");
  return {nodes_[node].stay_lower, nodes_[node].stay_upper};
}

std::vector<StateId> OnDemandSolver::members(NodeId node) const {
  const Node& n = nodes_.at(node);
  std::vector<StateId> result;
  if (n.kind == Node::Kind::kState) result.push_back(states_[n.local].original);
  for (std::uint32_t local : n.members) result.push_back(states_[local].original);
  std::sort(result.begin(), result.end());
  return result;
}

std::optional<std::pair<double, double>> OnDemandSolver::action_bounds(StateId state, std::uint32_t index) const {
  auto it = local_of_.find(state);
  if (it == local_of_.end()) return std::nullopt;
  const StateData& data = states_[it->second];
  if (!data.expanded || index >= data.num_actions) return std::nullopt;
  const ActionData& action = actions_[data.first_action + index];
  return std::pair{action.l, action.u};
}

std::size_t OnDemandSolver::explored_mecs() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& node) {
    return node.alive && node.kind == Node::Kind::kCollapsed;
  }));
}

std::uint64_t OnDemandSolver::next_random() { return rng_(); }

std::size_t OnDemandSolver::random_index(std::size_t bound) {
  // Multiply-shift with rejection: unbiased for every bound.
  const std::uint64_t range = bound;
  unsigned __int128 product = static_cast<unsigned __int128>(next_random()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next_random()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

double OnDemandSolver::random_unit() { return static_cast<double>(next_random() >> 11) * 0x1.0p-53; }

NodeId OnDemandSolver::successor_node(std::uint32_t local) const { return states_[local].node; }

inline std::uint32_t OnDemandSolver::pick_choice(const Node& node) {
  const double best = node.upper;
  // Only collapsed nodes can attain the maximum with their stay seed.
  const bool stay = node.stay_upper == best;
  std::uint32_t count = stay ? 1 : 0;
  std::uint32_t first = kStay;
  for (std::uint32_t a : node.exits) {
    if (actions_[a].u == best) {
      if (count == 0) first = a;
      ++count;
    }
  }
  if (count == 1) return first;
  if (count == 0) fail("no maximizing choice");
  // Uniform among maximizers; stay comes first in the enumeration.
  std::size_t pick = random_index(count);
  if (stay) {
    if (pick == 0) return kStay;
    --pick;
  }
  for (std::uint32_t a : node.exits) {
    if (actions_[a].u == best && pick-- == 0) return a;
  }
  fail("maximizer enumeration changed");
}

template <Heuristic H>
NodeId OnDemandSolver::sample_stay(Node& node) {
  const double plus = node.stay_lower;
  const double minus = 1.0 - node.stay_upper;
  const double unknown = node.stay_upper - node.stay_lower;
  if constexpr (H == Heuristic::kRoundRobin) {
    const NodeId targets[3] = {kPlus, kMinus, kUnknown};
    const double mass[3] = {plus, minus, unknown};
    for (int attempt = 0; attempt < 3; ++attempt) {
      const std::uint32_t slot = node.stay_round_robin++ % 3;
      if (mass[slot] > 0) return targets[slot];
    }
    return kMinus;
  } else {
    // Under MD only s? has a positive gap, so it is taken whenever possible.
    if (H == Heuristic::kMaxDifference && unknown > 0) return kUnknown;
    const double r = random_unit() * (plus + minus + unknown);
    if (plus > 0 && r < plus) return kPlus;
    if (minus > 0 && r < plus + minus) return kMinus;
    if (unknown > 0) return kUnknown;
    return minus > 0 ? kMinus : kPlus;
  }
}

template <Heuristic H>
NodeId OnDemandSolver::sample_action(ActionData& action) {
  const Succ* begin = successors_.data() + action.first_successor;
  const std::uint32_t count = action.num_successors;
  if (count == 1) return successor_node(begin[0].local);
  if constexpr (H == Heuristic::kRoundRobin) {
    return successor_node(begin[action.round_robin++ % count].local);
  } else {
    if constexpr (H == Heuristic::kMaxDifference) {
      double total = 0.0;
      for (std::uint32_t i = 0; i < count; ++i) {
        const Node& next = nodes_[successor_node(begin[i].local)];
        total += begin[i].probability * (next.upper - next.lower);
      }
      if (total > 0) {
        const double r = random_unit() * total;
        double cumulative = 0.0;
        std::uint32_t last = 0;
        for (std::uint32_t i = 0; i < count; ++i) {
          const Node& next = nodes_[successor_node(begin[i].local)];
          const double weight = begin[i].probability * (next.upper - next.lower);
          if (weight <= 0) continue;
          last = i;
          cumulative += weight;
          if (r < cumulative) return successor_node(begin[i].local);
        }
        return successor_node(begin[last].local);
      }
    }
    const double r = random_unit();
    double cumulative = 0.0;
    for (std::uint32_t i = 0; i + 1 < count; ++i) {
      cumulative += begin[i].probability;
      if (r < cumulative) return successor_node(begin[i].local);
    }
    return successor_node(begin[count - 1].local);
  }
}

template <Heuristic H>
void OnDemandSolver::walk() {
  path_.clear();
  NodeId current = initial_node();
  path_.push_back({current, kEnd});
  appear_[current] = 1;
  const std::uint32_t k = options_.k;
  while (true) {
    Node* node = &nodes_[current];
    if (node->kind == Node::Kind::kSink) break;
    if (node->kind == Node::Kind::kState && !states_[node->local].expanded) {
      expand_local(node->local);
      node = &nodes_[current];
    }
    const std::uint32_t choice = pick_choice(*node);
    path_.back().choice = choice;
    current = choice == kStay ? sample_stay<H>(*node) : sample_action<H>(actions_[choice]);
    path_.push_back({current, kEnd});
    if (++appear_[current] >= k) break;
  }
  for (const Step& step : path_) appear_[step.node] = 0;
}

const std::vector<OnDemandSolver::Step>& OnDemandSolver::sample_episode() {
  switch (options_.heuristic) {
    case Heuristic::kProbability:
      walk<Heuristic::kProbability>();
      break;
    case Heuristic::kRoundRobin:
      walk<Heuristic::kRoundRobin>();
      break;
    case Heuristic::kMaxDifference:
      walk<Heuristic::kMaxDifference>();
      break;
  }
  return path_;
}

void OnDemandSolver::refine(NodeId id) {
  Node& node = nodes_.at(id);
  if (!node.alive || node.kind != Node::Kind::kCollapsed) throw std::invalid_argument("refine needs a collapsed node");
  const double start_gap = node.stay_upper - node.stay_lower;
  if (start_gap <= kGapFloor) return;

  if (!node.vi) {
    std::unordered_map<std::uint32_t, StateId> index;
    for (std::uint32_t i = 0; i < node.members.size(); ++i) index.emplace(node.members[i], i);
    Mdp restricted;
    restricted.initial = 0;
    restricted.actions.resize(node.members.size());
    for (std::uint32_t a : node.internal) {
      const ActionData& data = actions_[a];
      Action action{"", data.reward, {}};
      for (std::uint32_t i = 0; i < data.num_successors; ++i) {
        const Succ& succ = successors_[data.first_successor + i];
        action.successors.push_back({index.at(succ.local), succ.probability});
      }
      restricted.actions[index.at(data.state)].push_back(std::move(action));
    }
    node.vi = std::make_unique<ValueIterator>(apply_aperiodicity_transform(restricted, options_.tau));
  }

  for (std::size_t steps = 0; steps < kRefineStepCap; ++steps) {
    node.vi->step();
    ++vi_steps_;
    const auto [lo, hi] = mec_value_bounds(node.vi->state(), r_max_);
    node.stay_lower = std::max(node.stay_lower, lo);
    node.stay_upper = std::min(node.stay_upper, hi);
    if (node.stay_lower > node.stay_upper) node.stay_lower = node.stay_upper;
    if (node.stay_upper - node.stay_lower <= 0.5 * start_gap) break;
  }
  refresh(id);
}

OnDemandSolver::PartialGraph OnDemandSolver::partial_graph() const {
  PartialGraph result;
  std::vector<std::uint32_t> index(nodes_.size(), kNoNode);
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& node = nodes_[id];
    if (!node.alive || node.kind == Node::Kind::kSink) continue;
    if (node.kind == Node::Kind::kState && !states_[node.local].expanded) continue;
    index[id] = static_cast<std::uint32_t>(result.nodes.size());
    result.nodes.push_back(id);
  }
  const auto sink = static_cast<StateId>(result.nodes.size());
  result.graph.successors.resize(result.nodes.size() + 1);
  for (std::uint32_t g = 0; g < result.nodes.size(); ++g) {
    for (std::uint32_t a : nodes_[result.nodes[g]].exits) {
      const ActionData& action = actions_[a];
      std::vector<StateId> support;
      for (std::uint32_t i = 0; i < action.num_successors; ++i) {
        const std::uint32_t target = index[successor_node(successors_[action.first_successor + i].local)];
        support.push_back(target == kNoNode ? sink : target);
      }
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
      result.graph.successors[g].push_back(std::move(support));
    }
  }
  return result;
}

void OnDemandSolver::collapse_end_components() {
  const PartialGraph partial = partial_graph();
  const std::vector<Mec> components = compute_mecs(partial.graph);
  for (const Mec& component : components) {
    const auto id = static_cast<NodeId>(nodes_.size());
    Node merged;
    merged.kind = Node::Kind::kCollapsed;
    std::vector<char> inside_action;  // parallel to the exits of each part
    for (StateId g : component.states) {
      Node& part = nodes_[partial.nodes[g]];
      if (part.kind == Node::Kind::kState) {
        merged.members.push_back(part.local);
      } else {
        merged.members.insert(merged.members.end(), part.members.begin(), part.members.end());
        merged.internal.insert(merged.internal.end(), part.internal.begin(), part.internal.end());
      }
    }
    std::size_t cursor = 0;
    for (StateId g : component.states) {
      const Node& part = nodes_[partial.nodes[g]];
      for (std::uint32_t i = 0; i < part.exits.size(); ++i) {
        const bool internal = cursor < component.actions.size() && component.actions[cursor].state == g &&
                              component.actions[cursor].index == i;
        if (internal) {
          ++cursor;
          merged.internal.push_back(part.exits[i]);
          actions_[part.exits[i]].internal = true;
        } else {
          merged.exits.push_back(part.exits[i]);
        }
      }
    }
    std::sort(merged.members.begin(), merged.members.end());
    std::sort(merged.internal.begin(), merged.internal.end());

    double low = std::numeric_limits<double>::infinity();
    double high = 0.0;
    for (std::uint32_t a : merged.internal) {
      low = std::min(low, actions_[a].reward);
      high = std::max(high, actions_[a].reward);
    }
    merged.stay_lower = r_max_ > 0 ? std::clamp(low / r_max_, 0.0, 1.0) : 0.0;
    merged.stay_upper = r_max_ > 0 ? std::clamp(high / r_max_, 0.0, 1.0) : 0.0;

    for (StateId g : component.states) {
      Node& part = nodes_[partial.nodes[g]];
      part.alive = false;
      part.replaced_by = id;
      part.exits.clear();
      part.vi.reset();
    }
    for (std::uint32_t local : merged.members) states_[local].node = id;
    nodes_.push_back(std::move(merged));
    appear_.push_back(0);
    refresh(id);
  }
  for (Step& step : path_) step.node = resolve(step.node);
}

void OnDemandSolver::back_propagate() {
  if (path_.size() < 2) return;
  for (std::size_t i = path_.size() - 1; i-- > 0;) {
    const Step step = path_[i];
    if (step.choice == kStay || step.choice == kEnd) {
      refresh(step.node);
      continue;
    }
    ActionData& action = actions_[step.choice];
    if (action.internal) continue;
    double u = 0.0;
    double l = 0.0;
    for (std::uint32_t j = 0; j < action.num_successors; ++j) {
      const Succ& succ = successors_[action.first_successor + j];
      const Node& next = nodes_[successor_node(succ.local)];
      u += succ.probability * next.upper;
      l += succ.probability * next.lower;
    }
    action.u = std::min(action.u, u);
    action.l = std::max(action.l, l);
    if (action.l > action.u) action.l = action.u;
    refresh(step.node);
  }
}

void OnDemandSolver::run_episode() {
  sample_episode();
  const NodeId last = path_.back().node;
  if (last == kUnknown) {
    refine(path_[path_.size() - 2].node);
  } else if (last != kPlus && last != kMinus) {
    collapse_end_components();
  }
  back_propagate();
  ++episodes_;
  if (options_.observer) {
    const NodeId init = initial_node();
    options_.observer({episodes_, r_max_ * nodes_[init].lower, r_max_ * nodes_[init].upper});
  }
}

OnDemandResult OnDemandSolver::run() {
  OnDemandResult result;
  if (r_max_ > 0) {
    const double threshold = 2 * options_.epsilon / r_max_;
    while (true) {
      const Node& init = nodes_[initial_node()];
      if (init.upper - init.lower < threshold) {
        result.converged = true;
        break;
      }
      if (episodes_ >= options_.max_episodes) break;
      if (options_.deadline && (episodes_ & 0xff) == 0 && Clock::now() >= *options_.deadline) {
        result.timed_out = true;
        break;
      }
      run_episode();
    }
  } else {
    result.converged = true;
  }
  const Node& init = nodes_[initial_node()];
  result.episodes = episodes_;
  result.explored_states = explored_;
  result.explored_mecs = explored_mecs();
  result.vi_steps = vi_steps_;
  if (r_max_ > 0) {
    result.lower = r_max_ * init.lower;
    result.upper = r_max_ * init.upper;
    result.value = r_max_ * 0.5 * (init.upper + init.lower);
  }
  return result;
}

OnDemandResult on_demand_vi(const LazyModel& model, const OnDemandOptions& options) {
  OnDemandSolver solver(model, options);
  return solver.run();
}

}  // namespace mpvi
