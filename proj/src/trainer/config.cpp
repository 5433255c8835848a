#include "slotzero/trainer/config.hpp"

#include <stdexcept>

namespace sz::trainer {

std::string to_string(ConsistencyLoss mode) {
  return mode == ConsistencyLoss::mse ? "mse" : "cosine";
}

namespace {

void check_trainer(const TrainerConfig& t) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("trainer config: " + what);
  };
  if (t.lambda_reward < 0 || t.lambda_policy < 0 || t.lambda_value < 0 || t.lambda_consistency < 0) {
    fail("loss weights must be >= 0");
  }
  if (!(t.gamma >= 0.0 && t.gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (t.td_steps < 1) fail("td_steps must be >= 1");
  if (t.unroll_steps < 1) fail("unroll_steps must be >= 1");
  if (t.t1 < 0 || t.t2 < 0) fail("t1 and t2 must be >= 0");
  if (t.buffer_capacity < 1) fail("buffer_capacity must be >= 1");
  if (!(t.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(t.adam_beta1 >= 0.0 && t.adam_beta1 < 1.0) || !(t.adam_beta2 >= 0.0 && t.adam_beta2 < 1.0)) {
    fail("adam betas must lie in [0, 1)");
  }
  if (!(t.adam_epsilon > 0.0)) fail("adam_epsilon must be > 0");
  if (!(t.max_grad_norm > 0.0)) fail("max_grad_norm must be > 0");
  if (t.batch_size < 1) fail("batch_size must be >= 1");
  if (!(t.train_ratio >= 0.0)) fail("train_ratio must be >= 0");
  if (t.min_replay < 1) fail("min_replay must be >= 1");
  if (t.total_env_steps < 0) fail("total_env_steps must be >= 0");
  if (t.eval_interval < 0) fail("eval_interval must be >= 0");
  if (t.eval_episodes < 0) fail("eval_episodes must be >= 0");
  if (t.checkpoint_interval < 0) fail("checkpoint_interval must be >= 0");
  if (!(t.stop_success >= 0.0 && t.stop_success <= 1.0)) fail("stop_success must lie in [0, 1]");
}

}  // namespace

RunConfig finalize(RunConfig c) {
  c.model.action.continuous = c.env.variant == env::Variant::continuous;
  if (!c.model.action.continuous) c.model.action.num_actions = env::kNumMoves;
  c.model.action.action_dim = 2;
  c.planner.gamma = c.trainer.gamma;
  c.planner.continuous = c.model.action.continuous;
  c.planner.num_actions = c.model.action.num_actions;
  c.planner.action_dim = c.model.action.action_dim;
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  env::validate(c.env);
  model::validate(c.model);
  planner::validate(c.planner);
  check_trainer(c.trainer);
  if (!(c.slots.noise_sigma >= 0.0)) throw std::invalid_argument("env config: slot_noise must be >= 0");
  if (c.model.action.continuous != (c.env.variant == env::Variant::continuous)) {
    throw std::invalid_argument("model config: action spec does not match the env variant");
  }
  if (c.model.slot_dim < static_cast<int>(slots::FeatureLayout::kRawWidth)) {
    throw std::invalid_argument("model config: slot_dim below the raw feature width");
  }
  if (c.planner.gamma != c.trainer.gamma) {
    throw std::invalid_argument("planner config: gamma differs from trainer gamma");
  }
}

slots::EncoderConfig encoder_config(const RunConfig& c) {
  return {c.env.num_objects, c.model.slot_dim, c.slots.noise_sigma};
}

planner::PlannerConfig planner_config(const RunConfig& c) {
  auto p = c.planner;
  p.gamma = c.trainer.gamma;
  p.continuous = c.model.action.continuous;
  p.num_actions = c.model.action.num_actions;
  p.action_dim = c.model.action.action_dim;
  return p;
}

}  // namespace sz::trainer
