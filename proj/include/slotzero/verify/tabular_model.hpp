#pragma once

#include <vector>

#include "slotzero/env/tabular.hpp"
#include "slotzero/planner/types.hpp"

namespace sz::verify {

/// Exact tables as a search model: transitions and rewards come from the MDP, the value head is
/// a supplied table (V* for oracle checks) and the policy prior is uniform.
class TabularSearchModel {
 public:
  struct Latent {
    int state = 0;
    double incoming_reward = 0.0;
  };

  TabularSearchModel(const env::TabularMdp& mdp, std::vector<double> values);

  planner::NodePrediction evaluate(const Latent& latent) const;
  Latent transition(const Latent& latent, const planner::ModelAction& action) const;

 private:
  const env::TabularMdp& mdp_;
  std::vector<double> values_;
};

static_assert(planner::SearchModel<TabularSearchModel>);

}  // namespace sz::verify
