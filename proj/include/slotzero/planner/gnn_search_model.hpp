#pragma once

#include "slotzero/model/gnn.hpp"
#include "slotzero/planner/types.hpp"

namespace sz::planner {

/// Plans in slot space with the learned dynamics and heads. Holds a reference to frozen params.
class GnnSearchModel {
 public:
  using Latent = slots::SlotSet;

  explicit GnnSearchModel(const model::ModelParams& params) : params_(params) {}

  NodePrediction evaluate(const Latent& latent) const;
  Latent transition(const Latent& latent, const ModelAction& action) const;

 private:
  const model::ModelParams& params_;
};

static_assert(SearchModel<GnnSearchModel>);

}  // namespace sz::planner
