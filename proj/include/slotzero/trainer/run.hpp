#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/trainer/agent.hpp"
#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/optimizer.hpp"
#include "slotzero/trainer/replay.hpp"
#include "slotzero/trainer/step.hpp"

namespace sz::trainer {

enum class RowKind { train, eval };

struct MetricsRow {
  RowKind kind = RowKind::train;
  std::int64_t iteration = 0;
  std::int64_t env_steps = 0;
  double loss_total = 0.0;
  double loss_reward = 0.0;
  double loss_policy = 0.0;
  double loss_value = 0.0;
  double loss_consistency = 0.0;
  double grad_norm = 0.0;
  std::int64_t td_branch = 0;
  std::int64_t search_branch = 0;
  double eval_success = 0.0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  std::int64_t faults = 0;  // running count of skipped updates
  bool operator==(const MetricsRow&) const = default;
};

/// Everything a run carries between environment steps.
struct TrainingState {
  model::ModelParams params;
  AdamState adam;
  ReplayBuffer buffer{1};
  std::int64_t iteration = 0;  // optimizer updates applied so far
  std::int64_t env_steps = 0;
  std::uint64_t episodes = 0;  // episodes started
  double train_credit = 0.0;
  std::int64_t faults = 0;
  bool stopped = false;        // early stop on eval success
  std::optional<EpisodeProgress> episode;
  std::vector<MetricsRow> metrics;
};

TrainingState initial_state(const RunConfig& config);

struct TrainingHooks {
  std::function<void(const TrainingState&)> checkpoint;
  std::function<void(const TrainStepResult&)> train_step;
  std::function<void(const MetricsRow&)> row;
};

/// Collect with search, insert finished episodes, train at train_ratio updates per env step,
/// evaluate every eval_interval env steps. All randomness derives from the run seed and the
/// step counters, so a run resumed from any saved state matches the uninterrupted one.
class Trainer {
 public:
  explicit Trainer(RunConfig config);
  Trainer(RunConfig config, TrainingState state);

  bool finished() const;
  /// One environment step with the training and evaluation it triggers.
  void advance(const TrainingHooks& hooks = {});
  /// Advances until finished; calls hooks.checkpoint at each checkpoint interval and at the end.
  void run(const TrainingHooks& hooks = {});

  const RunConfig& config() const { return config_; }
  const TrainingState& state() const { return state_; }
  TrainingState& state() { return state_; }

  MetricsRow evaluate_now() const;

 private:
  void collect();
  void train(const TrainingHooks& hooks);

  RunConfig config_;
  TrainingState state_;
};

/// Seeds the run uses; exposed so tests can replay individual pieces.
std::uint64_t params_seed(std::uint64_t run_seed);
EpisodeSeeds collection_seeds(std::uint64_t run_seed, std::uint64_t episode);
std::uint64_t batch_seed(std::uint64_t run_seed, std::int64_t iteration);
std::uint64_t eval_seed(std::uint64_t run_seed);

}  // namespace sz::trainer
