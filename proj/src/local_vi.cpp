#include "mpvi/local_vi.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace mpvi {

namespace {

MecValue solve_mec(const Mdp& mdp, const Mec& mec, double epsilon, const LocalViOptions& options) {
  MecValue result;
  result.mec = mec;
  if (mec.states.size() == 1) {
    // Only self-loops remain inside a single-state MEC.
    for (const ActionRef& ref : mec.actions) {
      result.w = std::max(result.w, mdp.actions[ref.state][ref.index].reward);
    }
    return result;
  }
  const auto restricted = restrict_to_mec(mdp, mec, mec.states.front());
  ViOptions vi_options;
  vi_options.tau = options.tau;
  vi_options.max_iters = options.max_iters;
  vi_options.deadline = options.deadline;
  const ViResult vi = run_vi(restricted.model, {StoppingCriterion::kSpan, epsilon}, vi_options);
  result.w = vi.value;
  result.iterations = vi.iterations;
  result.span = vi.upper && vi.lower ? *vi.upper - *vi.lower : 0.0;
  result.converged = vi.converged;
  return result;
}

}  // namespace

LocalViResult local_vi(const Mdp& mdp, double epsilon, const LocalViOptions& options) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (auto report = validate(mdp); !report.ok()) {
    throw std::invalid_argument("invalid model: " + report.violations.front().message);
  }
  LocalViResult result;
  result.total_states = mdp.num_states();
  const double r_max = max_reward(mdp);
  if (r_max == 0) return result;

  const std::vector<Mec> mecs = compute_mecs(mdp);
  result.per_mec.resize(mecs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(mecs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < mecs.size(); ++i) result.per_mec[i] = solve_mec(mdp, mecs[i], epsilon, options);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < mecs.size(); i = next++) {
          result.per_mec[i] = solve_mec(mdp, mecs[i], epsilon, options);
        }
      });
    }
    for (auto& thread : pool) thread.join();
  }

  std::vector<double> f;
  double max_half_span = 0.0;
  for (const MecValue& value : result.per_mec) {
    f.push_back(std::clamp(value.w / r_max, 0.0, 1.0));
    max_half_span = std::max(max_half_span, value.span / 2);
    result.iterations += value.iterations;
    result.converged = result.converged && value.converged;
  }

  const QuotientModel quotient = weighted_quotient(mdp, mecs, f);
  const StateId target[] = {*quotient.plus};
  ReachOptions reach_options;
  reach_options.deadline = options.deadline;
  result.reach = interval_reach(quotient, target, epsilon / (2 * r_max), reach_options);
  result.reach_p = result.reach.p;
  result.iterations += result.reach.iterations;
  result.converged = result.converged && result.reach.converged;
  result.timed_out = options.deadline && !result.converged && Clock::now() >= *options.deadline;

  result.value = r_max * result.reach.p;
  result.lower = std::max(0.0, r_max * result.reach.lower - max_half_span);
  result.upper = r_max * result.reach.upper + max_half_span;
  return result;
}

}  // namespace mpvi
