#pragma once

#include <concepts>
#include <cstdint>
#include <vector>

#include "slotzero/model/gaussian.hpp"
#include "slotzero/model/params.hpp"

namespace sz::planner {

using model::ModelAction;

struct PlannerConfig {
  int simulations = 16;     // N
  int num_candidates = 8;   // top-m for discrete roots (capped at |A|), M samples for continuous
  int depth_cap = 8;
  double gamma = 0.97;
  double beta = 0.75;       // continuous: probability of drawing a candidate from the policy
  double epsilon = 1e-3;    // mass of softmax(logits) mixed into the target policy
  double c_visit = 50.0;
  double c_scale = 0.1;
  bool continuous = false;
  int num_actions = 5;      // discrete action count
  int action_dim = 2;       // continuous action dimension
  bool operator==(const PlannerConfig&) const = default;
};

void validate(const PlannerConfig& config);

/// What a model reports for one latent state.
struct NodePrediction {
  double reward = 0.0;  // reward for the transition into this state; ignored at the root
  double value = 0.0;
  std::vector<double> logits;       // discrete
  model::GaussianPolicy gaussian;   // continuous
};

/// Anything the search can plan with: a learned world model or an exact table.
template <class M>
concept SearchModel = requires(const M& m, const typename M::Latent& s, const ModelAction& a) {
  { m.evaluate(s) } -> std::convertible_to<NodePrediction>;
  { m.transition(s, a) } -> std::convertible_to<typename M::Latent>;
};

/// One simulation: rewards r_0..r_{H-1} along the path and the bootstrap V(leaf) at depth H.
struct TrajectoryRecord {
  std::vector<double> rewards;
  double leaf_value = 0.0;
  int depth = 0;
  int candidate = -1;  // root action index the simulation went through
};

/// Root candidates with the perturbed scores used for tie-breaking.
struct CandidateSet {
  std::vector<ModelAction> actions;  // every root action (discrete: 0..A-1)
  std::vector<double> logits;        // per root action
  std::vector<double> gumbel;        // per root action
  std::vector<int> ids;              // kept candidates, best score first

  double score(int id) const { return gumbel[id] + logits[id]; }
};

struct SearchResult {
  std::vector<ModelAction> root_actions;
  std::vector<double> policy;   // target policy over root_actions, sums to 1
  std::vector<int> visits;      // per root action
  std::vector<double> q;        // per root action; completed value where unvisited
  double value = 0.0;           // search-based value estimate over the trajectory log
  double root_value = 0.0;      // root running average (includes its own prediction)
  double root_prediction = 0.0; // value head at the root
  int chosen = -1;              // index into root_actions
  ModelAction chosen_action;
  std::vector<TrajectoryRecord> trajectories;
};

}  // namespace sz::planner
