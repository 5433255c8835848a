#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/optimizer.hpp"
#include "slotzero/trainer/replay.hpp"
#include "slotzero/trainer/targets.hpp"

namespace sz::trainer {

struct TrainStepResult {
  bool applied = false;
  bool fault = false;
  std::string fault_message;
  double loss_total = 0.0;
  double loss_reward = 0.0;
  double loss_policy = 0.0;
  double loss_value = 0.0;
  double loss_consistency = 0.0;
  double grad_norm = 0.0;  // before clipping
  std::int64_t td_branch = 0;
  std::int64_t search_branch = 0;
  std::vector<std::size_t> batch;
  std::vector<BranchDecision> decisions;
};

/// Loss, backward pass, global-norm clip and one Adam update on prepared targets. A non-finite
/// loss or gradient leaves params and optimizer untouched and reports a fault.
TrainStepResult train_on_targets(const TrainTargets& targets, model::ModelParams& params,
                                 AdamState& adam, const TrainerConfig& config);

/// Samples a batch uniformly (from `batch_seed`), builds targets at iteration i_t and trains.
TrainStepResult train_step(const ReplayBuffer& buffer, model::ModelParams& params, AdamState& adam,
                           std::int64_t iteration, const TrainerConfig& config,
                           std::uint64_t batch_seed);

}  // namespace sz::trainer
