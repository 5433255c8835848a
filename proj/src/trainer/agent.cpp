#include "slotzero/trainer/agent.hpp"

#include <cmath>
#include <random>

#include "slotzero/planner/gnn_search_model.hpp"
#include "slotzero/planner/search.hpp"
#include "slotzero/util/seed.hpp"

namespace sz::trainer {

env::Action to_env_action(const model::ModelAction& action, const env::EnvConfig& config) {
  if (const int* move = std::get_if<int>(&action)) {
    if (config.variant != env::Variant::discrete) {
      throw std::invalid_argument("to_env_action: move index for a continuous env");
    }
    return *move;
  }
  const auto& u = std::get<std::vector<double>>(action);
  if (config.variant != env::Variant::continuous || u.size() != 2) {
    throw std::invalid_argument("to_env_action: displacement does not match the env");
  }
  return env::Vec2{config.max_delta * u[0], config.max_delta * u[1]};
}

planner::SearchResult plan(const model::ModelParams& params, const slots::SlotSet& observation,
                           const planner::PlannerConfig& config, std::uint64_t seed, bool explore) {
  const planner::GnnSearchModel model(params);
  return planner::run_search(model, observation, config, seed, explore);
}

bool is_success(const env::StepResult& step) {
  return step.done && !step.truncated && step.reward == 1.0;
}

namespace {

slots::SlotSet observe(const env::EnvState& state, const RunConfig& config, const EpisodeSeeds& seeds,
                       int step) {
  const auto perm = slots::new_episode_permutation(seeds.permutation, config.slots.permutation,
                                                   config.env.num_objects);
  return slots::encode(state, config.env, perm, encoder_config(config),
                       derive_seed(seeds.noise, {static_cast<std::uint64_t>(step)}));
}

}  // namespace

EpisodeProgress start_episode(const RunConfig& config, const EpisodeSeeds& seeds,
                              std::uint64_t episode_id) {
  const env::ObjectWorld world(config.env);
  EpisodeProgress p;
  p.seeds = seeds;
  p.episode_id = episode_id;
  p.state = world.reset(seeds.reset);
  return p;
}

void advance_episode(EpisodeProgress& p, const model::ModelParams& params, const RunConfig& config,
                     bool explore, bool keep_records) {
  if (p.finished) throw std::logic_error("advance_episode: episode already finished");
  const env::ObjectWorld world(config.env);
  const auto pcfg = planner_config(config);
  const slots::SlotSet obs = observe(p.state, config, p.seeds, p.steps);
  const auto search = plan(params, obs, pcfg,
                           derive_seed(p.seeds.search, {static_cast<std::uint64_t>(p.steps)}), explore);
  const auto step = world.step(p.state, to_env_action(search.chosen_action, config.env));
  if (keep_records) {
    TransitionRecord r;
    r.slots = obs;
    r.next_slots = observe(step.state, config, p.seeds, p.steps + 1);
    r.action = search.chosen_action;
    r.reward = step.reward;
    r.done = step.done && !step.truncated;
    r.truncated = step.truncated;
    r.policy = search.policy;
    if (pcfg.continuous) r.candidates = search.root_actions;
    r.search_value = search.value;
    r.episode = p.episode_id;
    r.position = p.steps;
    p.records.push_back(std::move(r));
  }
  p.total_return += step.reward;
  p.steps += 1;
  p.state = step.state;
  if (step.done) {
    p.finished = true;
    p.success = is_success(step);
  }
}

EpisodeOutcome play_episode(const model::ModelParams& params, const RunConfig& config,
                            const EpisodeSeeds& seeds, bool explore,
                            std::vector<TransitionRecord>* records, std::uint64_t episode_id) {
  EpisodeProgress p = start_episode(config, seeds, episode_id);
  while (!p.finished) advance_episode(p, params, config, explore, records != nullptr);
  if (records != nullptr) {
    for (auto& r : p.records) records->push_back(std::move(r));
  }
  return {p.total_return, p.success, p.steps};
}

EvalSummary summarize(const std::vector<EpisodeOutcome>& outcomes) {
  EvalSummary s;
  s.episodes = static_cast<int>(outcomes.size());
  if (outcomes.empty()) return s;
  double wins = 0.0, sum = 0.0;
  for (const auto& o : outcomes) {
    wins += o.success ? 1.0 : 0.0;
    sum += o.total_return;
  }
  s.success_rate = wins / s.episodes;
  s.return_mean = sum / s.episodes;
  double var = 0.0;
  for (const auto& o : outcomes) var += (o.total_return - s.return_mean) * (o.total_return - s.return_mean);
  s.return_std = std::sqrt(var / s.episodes);
  return s;
}

EvalSummary evaluate(const model::ModelParams& params, const RunConfig& config, int episodes,
                     std::uint64_t seed) {
  std::vector<EpisodeOutcome> outcomes;
  for (int i = 0; i < episodes; ++i) {
    const auto e = static_cast<std::uint64_t>(i);
    EpisodeSeeds s{derive_seed(seed, {1, e}), derive_seed(seed, {2, e}), derive_seed(seed, {3, e}),
                   derive_seed(seed, {4, e})};
    outcomes.push_back(play_episode(params, config, s, true));
  }
  return summarize(outcomes);
}

EvalSummary random_policy_baseline(const RunConfig& config, int episodes, std::uint64_t seed) {
  const env::ObjectWorld world(config.env);
  std::vector<EpisodeOutcome> outcomes;
  for (int i = 0; i < episodes; ++i) {
    const auto e = static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(derive_seed(seed, {9, e}));
    env::EnvState state = world.reset(derive_seed(seed, {1, e}));
    EpisodeOutcome o;
    while (true) {
      env::Action a;
      if (config.env.variant == env::Variant::discrete) {
        a = std::uniform_int_distribution<int>(0, env::kNumMoves - 1)(rng);
      } else {
        std::uniform_real_distribution<double> box(-config.env.max_delta, config.env.max_delta);
        const double dx = box(rng);
        a = env::Vec2{dx, box(rng)};
      }
      const auto step = world.step(state, a);
      o.total_return += step.reward;
      o.steps += 1;
      if (step.done) {
        o.success = is_success(step);
        break;
      }
      state = step.state;
    }
    outcomes.push_back(o);
  }
  return summarize(outcomes);
}

}  // namespace sz::trainer
