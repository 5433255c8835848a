#pragma once

#include <cstdint>
#include <vector>

#include "slotzero/env/objectworld.hpp"
#include "slotzero/model/params.hpp"
#include "slotzero/planner/types.hpp"
#include "slotzero/slots/encoder.hpp"
#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/replay.hpp"

namespace sz::trainer {

/// Model actions are move indices or displacements in units of max_delta.
env::Action to_env_action(const model::ModelAction& action, const env::EnvConfig& config);

/// Gumbel search from one observation; `explore` toggles the root Gumbel noise.
planner::SearchResult plan(const model::ModelParams& params, const slots::SlotSet& observation,
                           const planner::PlannerConfig& config, std::uint64_t seed, bool explore);

struct EpisodeOutcome {
  double total_return = 0.0;
  bool success = false;
  int steps = 0;
};

/// True when the step ended the episode by touching the target.
bool is_success(const env::StepResult& step);

/// Seeds for one episode; every random choice in it derives from these.
struct EpisodeSeeds {
  bool operator==(const EpisodeSeeds&) const = default;
  std::uint64_t reset = 0;
  std::uint64_t permutation = 0;
  std::uint64_t noise = 0;
  std::uint64_t search = 0;
};

/// An episode in flight. Observations are recomputed from the seeds and state, so this is all
/// a checkpoint needs to continue it.
struct EpisodeProgress {
  EpisodeSeeds seeds;
  std::uint64_t episode_id = 0;
  env::EnvState state;
  int steps = 0;
  double total_return = 0.0;
  bool finished = false;
  bool success = false;
  std::vector<TransitionRecord> records;
  bool operator==(const EpisodeProgress&) const = default;
};

EpisodeProgress start_episode(const RunConfig& config, const EpisodeSeeds& seeds,
                              std::uint64_t episode_id);

/// One search plus one environment step. Records the transition when `keep_records` is set.
void advance_episode(EpisodeProgress& progress, const model::ModelParams& params,
                     const RunConfig& config, bool explore, bool keep_records);

/// Plays one episode with search. Appends one record per step when `records` is given.
EpisodeOutcome play_episode(const model::ModelParams& params, const RunConfig& config,
                            const EpisodeSeeds& seeds, bool explore,
                            std::vector<TransitionRecord>* records = nullptr,
                            std::uint64_t episode_id = 0);

struct EvalSummary {
  int episodes = 0;
  double success_rate = 0.0;
  double return_mean = 0.0;
  double return_std = 0.0;
};

/// Evaluation over a fixed set of episode seeds derived from `seed`. Every step takes the
/// search's chosen action (the top-Q halving survivor) and records nothing. The root Gumbel
/// draw stays on: with g = 0 an untrained model would break every tie towards action 0.
EvalSummary evaluate(const model::ModelParams& params, const RunConfig& config, int episodes,
                     std::uint64_t seed);

/// Success rate of uniformly random actions over `episodes` episodes.
EvalSummary random_policy_baseline(const RunConfig& config, int episodes, std::uint64_t seed);

EvalSummary summarize(const std::vector<EpisodeOutcome>& outcomes);

}  // namespace sz::trainer
