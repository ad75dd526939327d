#include "mpvi/lazy_model.hpp"

#include <stdexcept>

namespace mpvi {

MdpLazyModel::MdpLazyModel(Mdp mdp) : mdp_(std::move(mdp)), r_max_(mpvi::max_reward(mdp_)) {
  if (mdp_.num_states() == 0) throw std::invalid_argument("model has no states");
}

std::vector<Action> MdpLazyModel::actions(StateId state) const {
  if (state >= mdp_.num_states()) throw std::out_of_range("state out of range");
  return mdp_.actions[state];
}

}  // namespace mpvi
