#pragma once

#include <cstdint>
#include <string>

#include "slotzero/env/objectworld.hpp"
#include "slotzero/model/params.hpp"
#include "slotzero/planner/types.hpp"
#include "slotzero/slots/encoder.hpp"

namespace sz::trainer {

enum class ConsistencyLoss { mse, cosine };

std::string to_string(ConsistencyLoss mode);

struct TrainerConfig {
  double lambda_reward = 1.0;
  double lambda_policy = 1.0;
  double lambda_value = 0.25;
  double lambda_consistency = 2.0;
  double gamma = 0.97;
  int td_steps = 5;                // l
  int unroll_steps = 5;            // l_unroll
  std::int64_t t1 = 2000;          // TD branch while the iteration count is below this
  std::int64_t t2 = 10000;         // TD branch for records older than capacity - t2
  std::int64_t buffer_capacity = 100000;
  double learning_rate = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double max_grad_norm = 0.5;
  int batch_size = 64;
  double train_ratio = 0.25;       // optimizer steps per environment step
  std::int64_t min_replay = 256;   // records required before the first update
  std::int64_t total_env_steps = 50000;
  std::int64_t eval_interval = 2500;  // environment steps between evaluations
  int eval_episodes = 50;
  std::int64_t checkpoint_interval = 0;  // environment steps; 0 writes only the final one
  double stop_success = 0.0;       // stop once an evaluation reaches this success rate (0: never)
  ConsistencyLoss consistency = ConsistencyLoss::mse;
  bool absorbing_terminal = true;  // value target 0 on the state after a true contact
  bool operator==(const TrainerConfig&) const = default;
};

/// Encoder settings that belong to the environment block of the run file.
struct SlotConfig {
  slots::PermutationMode permutation = slots::PermutationMode::identity;
  double noise_sigma = 0.0;
  bool operator==(const SlotConfig&) const = default;
};

struct RunConfig {
  env::EnvConfig env;
  SlotConfig slots;
  model::ModelConfig model;
  planner::PlannerConfig planner;
  TrainerConfig trainer;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  bool operator==(const RunConfig&) const = default;
};

/// Fills the fields one block derives from another (action spec, planner gamma) and checks
/// every block. Throws std::invalid_argument on the first violation.
RunConfig finalize(RunConfig config);
void validate(const RunConfig& config);

slots::EncoderConfig encoder_config(const RunConfig& config);
planner::PlannerConfig planner_config(const RunConfig& config);

}  // namespace sz::trainer
