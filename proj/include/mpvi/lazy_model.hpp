#pragma once

#include "mpvi/mdp.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace mpvi {

/// A model revealed state by state. Queries are pure: the same state always
/// yields the same actions. max_reward() bounds every reward ever revealed.
class LazyModel {
 public:
  virtual ~LazyModel() = default;

  virtual StateId initial() const = 0;
  virtual std::vector<Action> actions(StateId state) const = 0;
  virtual double max_reward() const = 0;
  /// Total state count when known without exploring.
  virtual std::optional<std::size_t> num_states() const { return std::nullopt; }
};

/// Adapts an explicit model.
class MdpLazyModel final : public LazyModel {
 public:
  explicit MdpLazyModel(Mdp mdp);

  StateId initial() const override { return mdp_.initial; }
  std::vector<Action> actions(StateId state) const override;
  double max_reward() const override { return r_max_; }
  std::optional<std::size_t> num_states() const override { return mdp_.num_states(); }

  const Mdp& model() const { return mdp_; }

 private:
  Mdp mdp_;
  double r_max_;
};

}  // namespace mpvi
