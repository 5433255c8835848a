#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/tensor/tensor.hpp"
#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/replay.hpp"

namespace sz::trainer {

enum class ValueBranch { td, search };

/// The inputs of one mixed-target branch decision, kept so the choice can be replayed.
struct BranchDecision {
  std::int64_t iteration = 0;
  std::int64_t age = 0;
  ValueBranch branch = ValueBranch::td;
};

/// TD while iteration < t1 or the record is older than capacity - t2; search value otherwise.
bool use_td_branch(std::int64_t iteration, std::int64_t age, const TrainerConfig& config);

/// sum_i gamma^i rewards[i] + gamma^n bootstrap, n = rewards.size(); no bootstrap term when absent.
double td_return(std::span<const double> rewards, std::optional<double> bootstrap, double gamma);

using ValueFn = std::function<double(const slots::SlotSet&)>;

struct ValueTarget {
  double value = 0.0;
  BranchDecision decision;
};

/// Mixed value target for the record at buffer position `index`. The TD branch walks at
/// most td_steps records forward and bootstraps from `value_of` on s_{t+l} unless the
/// episode ended first.
ValueTarget value_target(const ReplayBuffer& buffer, std::size_t index, std::int64_t iteration,
                         const TrainerConfig& config, const ValueFn& value_of);

/// Per (step k, sample b) targets for an unrolled batch; entries are stored at k * batch + b.
struct TrainTargets {
  std::size_t batch = 0;
  std::size_t unroll = 0;
  std::size_t width = 0;       // policy entries per row (actions or candidates)
  Tensor initial;              // [B, K, D] slots of the sampled records
  std::vector<model::ModelAction> actions;
  std::vector<double> reward;
  std::vector<double> value;
  std::vector<double> policy;  // width per row
  std::vector<double> candidates;  // continuous: width * action_dim per row
  std::vector<double> next_slots;  // K * D per row
  std::vector<char> mask;             // policy term
  std::vector<char> transition_mask;  // reward and consistency terms: mask plus absorbing rows
  std::vector<char> value_mask;       // mask plus absorbing rows
  std::vector<BranchDecision> decisions;

  std::size_t row(std::size_t k, std::size_t b) const { return k * batch + b; }
};

/// Targets for the records at `indices`, using the value head of `params` for TD bootstraps.
TrainTargets build_targets(const ReplayBuffer& buffer, std::span<const std::size_t> indices,
                           const model::ModelParams& params, std::int64_t iteration,
                           const TrainerConfig& config);

}  // namespace sz::trainer
