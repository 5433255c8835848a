#include "slotzero/planner/gnn_search_model.hpp"

namespace sz::planner {

NodePrediction GnnSearchModel::evaluate(const Latent& latent) const {
  auto heads = model::predict_heads(params_, latent);
  NodePrediction out;
  out.reward = heads.reward;
  out.value = heads.value;
  out.logits = std::move(heads.logits);
  out.gaussian.mean = std::move(heads.mean);
  out.gaussian.log_std = std::move(heads.log_std);
  return out;
}

GnnSearchModel::Latent GnnSearchModel::transition(const Latent& latent,
                                                  const ModelAction& action) const {
  return model::dynamics_step(params_, latent, action);
}

}  // namespace sz::planner
