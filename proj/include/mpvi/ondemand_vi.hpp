#pragma once

#include "mpvi/lazy_model.hpp"
#include "mpvi/mec.hpp"
#include "mpvi/vi.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mpvi {

/// Successor selection during simulation.
enum class Heuristic {
  kProbability,    // PR: by transition probability
  kRoundRobin,     // RR: cycle through the successors of each action
  kMaxDifference,  // MD: by probability times the successor's bound gap
};

std::string_view to_string(Heuristic heuristic);
std::optional<Heuristic> parse_heuristic(std::string_view text);

struct EpisodeReport {
  std::size_t episode = 0;
  double lower = 0.0;  // r_max * l(init)
  double upper = 0.0;  // r_max * u(init)
};

struct OnDemandOptions {
  double epsilon = 1e-6;
  unsigned k = 6;
  Heuristic heuristic = Heuristic::kMaxDifference;
  std::uint64_t seed = 0;
  double tau = 0.95;
  std::size_t max_episodes = std::numeric_limits<std::size_t>::max();
  std::optional<Clock::time_point> deadline;
  std::function<void(const EpisodeReport&)> observer;
};

struct OnDemandResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t episodes = 0;
  std::size_t explored_states = 0;
  std::size_t explored_mecs = 0;
  std::size_t vi_steps = 0;
  bool converged = false;
  bool timed_out = false;
};

using NodeId = std::uint32_t;

/// Simulation-guided value iteration on a lazily explored, incrementally
/// collapsed bounded quotient. Bounds are normalized to [0, 1] by r_max.
///
/// Nodes of the partial quotient are the three sinks s+ (0), s- (1), s? (2),
/// one node per discovered state, and one node per collapsed end component;
/// merged nodes are retired, never reused.
class OnDemandSolver {
 public:
  static constexpr NodeId kPlus = 0;
  static constexpr NodeId kMinus = 1;
  static constexpr NodeId kUnknown = 2;
  static constexpr std::uint32_t kStay = ~std::uint32_t{0};
  static constexpr std::uint32_t kEnd = kStay - 1;

  /// One path position: a node and the choice taken there (an action id, or
  /// kStay). The final position carries kEnd.
  struct Step {
    NodeId node;
    std::uint32_t choice;
  };

  /// The live part of the partial quotient as a support graph; unexplored
  /// successors lead to one extra state without actions.
  struct PartialGraph {
    SupportGraph graph;
    std::vector<NodeId> nodes;  // graph state -> node
  };

  OnDemandSolver(const LazyModel& model, OnDemandOptions options);
  ~OnDemandSolver();
  OnDemandSolver(const OnDemandSolver&) = delete;
  OnDemandSolver& operator=(const OnDemandSolver&) = delete;

  /// Runs episodes until the gap at the initial node is below 2 eps / r_max
  /// or a budget runs out.
  OnDemandResult run();

  /// One episode: simulate, then refine or collapse, then back-propagate.
  void run_episode();

  /// Simulates one path from the initial node, expanding states on the way.
  const std::vector<Step>& sample_episode();
  /// Resumes value iteration of a collapsed node until its gap halves.
  void refine(NodeId node);
  /// Collapses every end component of the partial quotient and rewrites the
  /// current path onto the new nodes.
  void collapse_end_components();
  /// Updates bounds backwards along the current path.
  void back_propagate();

  const std::vector<Step>& path() const { return path_; }
  PartialGraph partial_graph() const;

  NodeId initial_node() const;
  /// Node currently holding an original state, if discovered.
  std::optional<NodeId> node_of(StateId state) const;
  /// Discovers and expands a state; returns its node.
  NodeId expand(StateId state);
  double upper(NodeId node) const;
  double lower(NodeId node) const;
  bool is_collapsed(NodeId node) const;
  bool is_alive(NodeId node) const;
  std::pair<double, double> stay_bounds(NodeId node) const;  // (lower, upper)
  std::vector<StateId> members(NodeId node) const;           // original states
  /// (lower, upper) of action `index` of an expanded original state.
  std::optional<std::pair<double, double>> action_bounds(StateId state, std::uint32_t index) const;

  std::size_t episodes() const { return episodes_; }
  std::size_t explored_states() const { return explored_; }
  std::size_t explored_mecs() const;
  double r_max() const { return r_max_; }
  const OnDemandOptions& options() const { return options_; }

 private:
  struct ActionData;
  struct StateData;
  struct Node;

  std::uint32_t local_id(StateId state);
  void expand_local(std::uint32_t local);
  void refresh(NodeId node);
  NodeId resolve(NodeId node) const;
  std::uint32_t pick_choice(const Node& node);
  template <Heuristic H>
  NodeId sample_stay(Node& node);
  template <Heuristic H>
  NodeId sample_action(ActionData& action);
  template <Heuristic H>
  void walk();
  NodeId successor_node(std::uint32_t local) const;
  std::uint64_t next_random();
  std::size_t random_index(std::size_t bound);
  double random_unit();

  const LazyModel& model_;
  OnDemandOptions options_;
  double r_max_;
  std::mt19937_64 rng_;

  std::vector<StateData> states_;
  std::vector<ActionData> actions_;
  struct Succ {
    std::uint32_t local;
    double probability;
  };
  std::vector<Succ> successors_;
  std::vector<Node> nodes_;
  std::unordered_map<StateId, std::uint32_t> local_of_;
  std::uint32_t initial_local_;

  std::vector<Step> path_;
  std::vector<std::uint32_t> appear_;
  std::size_t episodes_ = 0;
  std::size_t explored_ = 0;
  std::size_t vi_steps_ = 0;
};

/// Number of positions of `node` on `path`.
std::size_t appear(NodeId node, const std::vector<OnDemandSolver::Step>& path);

/// Convenience wrapper; r_max = 0 short-circuits to value 0.
OnDemandResult on_demand_vi(const LazyModel& model, const OnDemandOptions& options);

}  // namespace mpvi
