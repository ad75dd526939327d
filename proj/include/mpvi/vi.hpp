#pragma once

#include "mpvi/mdp.hpp"

#include <chrono>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mpvi {

using Clock = std::chrono::steady_clock;

/// Raised when an algorithm is asked to run outside its guarantees, e.g. the
/// span criterion on a multichain model.
class SolverGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterate of total-reward value iteration: values = t_n, delta = t_n - t_{n-1}.
struct ViState {
  std::vector<double> values;
  std::vector<double> delta;
  std::size_t iteration = 0;
};

enum class StoppingCriterion {
  kSpan,            // sp(delta_n) < eps; sound on communicating models
  kSpanDifference,  // sp(delta_{n-1}) - sp(delta_n) < eps; unsound
  kDeltaChange,     // |delta_n - delta_{n-1}|_inf < eps; unsound
};

struct Criterion {
  StoppingCriterion tag = StoppingCriterion::kSpan;
  double epsilon = 1e-6;
};

ViState initial_vi_state(const Mdp& mdp);

/// One synchronous Bellman update: t(s) = max_a r(s,a) + sum_s' P(s,a,s') t(s').
ViState vi_step(const Mdp& mdp, const ViState& state);

/// max(v) - min(v). Throws on an empty vector.
double span(std::span<const double> values);

/// Resumable value iteration on a fixed model, updating in place.
///
/// Internally iterates relative values h_n = t_n - c_n, with c_n the value
/// of state 0, so delta = T(h) - h is computed from numbers of the size of
/// the bias rather than of n * r_max. t_n is reported as h_n + c_n.
class ValueIterator {
 public:
  explicit ValueIterator(Mdp model);

  void step();
  const ViState& state() const { return state_; }
  const Mdp& model() const { return model_; }

 private:
  Mdp model_;
  ViState state_;
  std::vector<double> relative_;
  double offset_ = 0.0;
  std::vector<double> next_;
};

struct ViOptions {
  std::size_t max_iters = 10'000'000;
  double tau = 0.95;  // aperiodicity mixing used with the span criterion
  std::optional<Clock::time_point> deadline;
};

struct ViResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool criterion_unsound = false;
  bool timed_out = false;
  std::vector<double> delta;
  /// Span criterion only: min and max of the final delta; they bracket the gain.
  std::optional<double> lower;
  std::optional<double> upper;
};

/// Value iteration with the chosen stopping criterion. The span criterion
/// requires a communicating model, applies the aperiodicity transform with
/// `options.tau`, and returns the midpoint of the final delta range. The two
/// unsound criteria return t_n(init) / n as the textbook algorithm does.
ViResult run_vi(const Mdp& mdp, const Criterion& criterion, const ViOptions& options = {});

/// Normalized bounds (min delta / r_max, max delta / r_max), clamped to [0, 1].
std::pair<double, double> mec_value_bounds(const ViState& state, double r_max);

}  // namespace mpvi
