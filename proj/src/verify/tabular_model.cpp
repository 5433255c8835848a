#include "slotzero/verify/tabular_model.hpp"

#include <stdexcept>
#include <variant>

namespace sz::verify {

TabularSearchModel::TabularSearchModel(const env::TabularMdp& mdp, std::vector<double> values)
    : mdp_(mdp), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(mdp.num_states)) {
    throw std::invalid_argument("TabularSearchModel: value table size mismatch");
  }
}

planner::NodePrediction TabularSearchModel::evaluate(const Latent& latent) const {
  planner::NodePrediction p;
  p.reward = latent.incoming_reward;
  p.value = values_.at(static_cast<std::size_t>(latent.state));
  p.logits.assign(static_cast<std::size_t>(mdp_.num_actions), 0.0);
  return p;
}

TabularSearchModel::Latent TabularSearchModel::transition(const Latent& latent,
                                                          const planner::ModelAction& action) const {
  const int a = std::get<int>(action);
  return {mdp_.successor(latent.state, a), mdp_.reward_of(latent.state, a)};
}

}  // namespace sz::verify
