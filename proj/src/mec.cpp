#include "mpvi/mec.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpvi {

std::vector<std::uint32_t> strongly_connected_components(const SupportGraph& graph,
                                                         const std::vector<std::vector<char>>& allowed,
                                                         std::uint32_t* component_count) {
  constexpr std::uint32_t kUnvisited = ~std::uint32_t{0};
  const std::size_t n = graph.num_states();
  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> lowlink(n, 0);
  std::vector<std::uint32_t> component(n, kUnvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  std::uint32_t next_index = 0;
  std::uint32_t next_component = 0;

  // Frame: state, action cursor, successor cursor.
  struct Frame {
    StateId state;
    std::uint32_t action;
    std::uint32_t successor;
  };
  std::vector<Frame> frames;

  for (StateId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.push_back({root, 0, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!frames.empty()) {
      Frame& frame = frames.back();
      const StateId v = frame.state;
      bool descended = false;
      const auto& acts = graph.successors[v];
      while (frame.action < acts.size()) {
        if (!allowed[v][frame.action] || frame.successor >= acts[frame.action].size()) {
          ++frame.action;
          frame.successor = 0;
          continue;
        }
        const StateId w = acts[frame.action][frame.successor++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;

      if (lowlink[v] == index[v]) {
        StateId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component[w] = next_component;
        } while (w != v);
        ++next_component;
      }
      frames.pop_back();
      if (!frames.empty()) {
        const StateId parent = frames.back().state;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  if (component_count) *component_count = next_component;
  return component;
}

std::vector<Mec> compute_mecs(const SupportGraph& graph) {
  const std::size_t n = graph.num_states();
  std::vector<std::vector<char>> allowed(n);
  for (StateId s = 0; s < n; ++s) allowed[s].assign(graph.successors[s].size(), 1);

  std::vector<std::uint32_t> component;
  bool changed = true;
  while (changed) {
    changed = false;
    component = strongly_connected_components(graph, allowed);
    for (StateId s = 0; s < n; ++s) {
      for (std::uint32_t a = 0; a < graph.successors[s].size(); ++a) {
        if (!allowed[s][a]) continue;
        for (StateId t : graph.successors[s][a]) {
          if (component[t] != component[s]) {
            allowed[s][a] = 0;
            changed = true;
            break;
          }
        }
      }
    }
  }

  // Group surviving states by component, ordered by smallest member.
  std::vector<std::int64_t> slot_of_component(n, -1);
  std::vector<Mec> mecs;
  for (StateId s = 0; s < n; ++s) {
    const bool has_action = std::any_of(allowed[s].begin(), allowed[s].end(), [](char c) { return c != 0; });
    if (!has_action) continue;
    auto& slot = slot_of_component[component[s]];
    if (slot < 0) {
      slot = static_cast<std::int64_t>(mecs.size());
      mecs.emplace_back();
    }
    Mec& mec = mecs[static_cast<std::size_t>(slot)];
    mec.states.push_back(s);
    for (std::uint32_t a = 0; a < allowed[s].size(); ++a) {
      if (allowed[s][a]) mec.actions.push_back({s, a});
    }
  }
  return mecs;
}

std::string_view to_string(ModelClass model_class) {
  switch (model_class) {
    case ModelClass::kStronglyConnected:
      return "strongly-connected";
    case ModelClass::kCommunicating:
      return "communicating";
    case ModelClass::kMultichain:
      return "multichain";
  }
  return "unknown";
}

ModelClass classify(const SupportGraph& graph) {
  const auto mecs = compute_mecs(graph);
  if (mecs.size() != 1) return ModelClass::kMultichain;
  std::size_t total_actions = 0;
  for (const auto& acts : graph.successors) total_actions += acts.size();
  if (mecs.front().states.size() == graph.num_states() && mecs.front().actions.size() == total_actions) {
    return ModelClass::kStronglyConnected;
  }
  return ModelClass::kCommunicating;
}

namespace detail {

void check_mecs_consistent(const SupportGraph& graph, const std::vector<Mec>& mecs) {
  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<std::uint32_t> owner(graph.num_states(), kNone);
  for (std::uint32_t i = 0; i < mecs.size(); ++i) {
    if (mecs[i].states.empty() || mecs[i].actions.empty()) throw std::invalid_argument("empty end component");
    for (StateId s : mecs[i].states) {
      if (s >= graph.num_states()) throw std::invalid_argument("end component state out of range");
      if (owner[s] != kNone) throw std::invalid_argument("end components overlap");
      owner[s] = i;
    }
  }
  for (std::uint32_t i = 0; i < mecs.size(); ++i) {
    for (const ActionRef& ref : mecs[i].actions) {
      if (ref.state >= graph.num_states() || owner[ref.state] != i ||
          ref.index >= graph.successors[ref.state].size()) {
        throw std::invalid_argument("end component action does not belong to its states");
      }
      for (StateId t : graph.successors[ref.state][ref.index]) {
        if (owner[t] != i) throw std::invalid_argument("end component action leaves the component");
      }
    }
  }
}

}  // namespace detail

}  // namespace mpvi
