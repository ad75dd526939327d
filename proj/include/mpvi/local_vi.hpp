#pragma once

#include "mpvi/mec.hpp"
#include "mpvi/reach.hpp"
#include "mpvi/vi.hpp"

#include <vector>

namespace mpvi {

struct MecValue {
  Mec mec;
  double w = 0.0;              // gain estimate, within epsilon / 2
  std::size_t iterations = 0;  // VI steps; 0 for single-state MECs
  double span = 0.0;           // final span of the iterate difference
  bool converged = true;
};

struct LocalViOptions {
  double tau = 0.95;
  std::size_t max_iters = 10'000'000;
  std::optional<Clock::time_point> deadline;
  /// Worker threads for the per-MEC runs; results do not depend on it.
  unsigned workers = 1;
};

struct LocalViResult {
  double value = 0.0;
  /// Certified bracket around the gain of the initial state.
  double lower = 0.0;
  double upper = 0.0;
  std::vector<MecValue> per_mec;
  double reach_p = 0.0;
  ReachResult reach;
  std::size_t total_states = 0;
  std::size_t iterations = 0;  // VI steps plus reachability sweeps
  bool converged = true;
  bool timed_out = false;
};

/// Solves every MEC to epsilon / 2 with span-based value iteration, folds the
/// values into the weighted quotient and computes the probability of reaching
/// s+ to epsilon / (2 r_max). The result is within epsilon of the gain.
LocalViResult local_vi(const Mdp& mdp, double epsilon, const LocalViOptions& options = {});

}  // namespace mpvi
