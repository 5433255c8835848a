#include "slotzero/trainer/run.hpp"

#include "slotzero/util/seed.hpp"

namespace sz::trainer {

std::uint64_t params_seed(std::uint64_t run_seed) { return derive_seed(run_seed, {0}); }

EpisodeSeeds collection_seeds(std::uint64_t run_seed, std::uint64_t episode) {
  return {derive_seed(run_seed, {1, episode}), derive_seed(run_seed, {2, episode}),
          derive_seed(run_seed, {3, episode}), derive_seed(run_seed, {4, episode})};
}

std::uint64_t batch_seed(std::uint64_t run_seed, std::int64_t iteration) {
  return derive_seed(run_seed, {5, static_cast<std::uint64_t>(iteration)});
}

std::uint64_t eval_seed(std::uint64_t run_seed) { return derive_seed(run_seed, {6}); }

TrainingState initial_state(const RunConfig& config) {
  TrainingState s;
  s.params = model::init_params(config.model, params_seed(config.seed));
  s.adam = AdamState::zeros_like(s.params);
  s.buffer = ReplayBuffer(config.trainer.buffer_capacity);
  return s;
}

Trainer::Trainer(RunConfig config) : config_(finalize(std::move(config))), state_(initial_state(config_)) {}

Trainer::Trainer(RunConfig config, TrainingState state)
    : config_(finalize(std::move(config))), state_(std::move(state)) {}

bool Trainer::finished() const {
  return state_.stopped || state_.env_steps >= config_.trainer.total_env_steps;
}

MetricsRow Trainer::evaluate_now() const {
  const auto e = evaluate(state_.params, config_, config_.trainer.eval_episodes, eval_seed(config_.seed));
  MetricsRow row;
  row.kind = RowKind::eval;
  row.iteration = state_.iteration;
  row.env_steps = state_.env_steps;
  row.eval_success = e.success_rate;
  row.eval_return_mean = e.return_mean;
  row.eval_return_std = e.return_std;
  row.faults = state_.faults;
  return row;
}

void Trainer::collect() {
  if (!state_.episode) {
    state_.episode = start_episode(config_, collection_seeds(config_.seed, state_.episodes),
                                   state_.episodes);
    state_.episodes += 1;
  }
  advance_episode(*state_.episode, state_.params, config_, true, true);
  state_.env_steps += 1;
  if (state_.episode->finished) {
    for (auto& r : state_.episode->records) r.insertion_iteration = state_.iteration;
    state_.buffer.insert_episode(std::move(state_.episode->records));
    state_.episode.reset();
  }
}

void Trainer::train(const TrainingHooks& hooks) {
  const auto& t = config_.trainer;
  if (static_cast<std::int64_t>(state_.buffer.size()) < t.min_replay) return;
  state_.train_credit += t.train_ratio;
  while (state_.train_credit >= 1.0) {
    state_.train_credit -= 1.0;
    const auto r = train_step(state_.buffer, state_.params, state_.adam, state_.iteration, t,
                              batch_seed(config_.seed, state_.iteration));
    if (hooks.train_step) hooks.train_step(r);
    if (r.fault) state_.faults += 1;
    MetricsRow row;
    row.kind = RowKind::train;
    row.iteration = state_.iteration;
    row.env_steps = state_.env_steps;
    row.loss_total = r.loss_total;
    row.loss_reward = r.loss_reward;
    row.loss_policy = r.loss_policy;
    row.loss_value = r.loss_value;
    row.loss_consistency = r.loss_consistency;
    row.grad_norm = r.grad_norm;
    row.td_branch = r.td_branch;
    row.search_branch = r.search_branch;
    row.faults = state_.faults;
    state_.metrics.push_back(row);
    if (hooks.row) hooks.row(row);
    // The iteration counter advances on every attempt so batch seeds never repeat.
    state_.iteration += 1;
  }
}

void Trainer::advance(const TrainingHooks& hooks) {
  if (finished()) return;
  collect();
  train(hooks);
  const auto& t = config_.trainer;
  const bool last = state_.env_steps >= t.total_env_steps;
  const bool due = t.eval_interval > 0 && state_.env_steps % t.eval_interval == 0;
  if ((due || last) && t.eval_episodes > 0) {
    const MetricsRow row = evaluate_now();
    state_.metrics.push_back(row);
    if (hooks.row) hooks.row(row);
    if (t.stop_success > 0.0 && row.eval_success >= t.stop_success) state_.stopped = true;
  }
}

void Trainer::run(const TrainingHooks& hooks) {
  const auto interval = config_.trainer.checkpoint_interval;
  while (!finished()) {
    advance(hooks);
    if (interval > 0 && state_.env_steps % interval == 0 && !finished() && hooks.checkpoint) {
      hooks.checkpoint(state_);
    }
  }
  if (hooks.checkpoint) hooks.checkpoint(state_);
}

}  // namespace sz::trainer
