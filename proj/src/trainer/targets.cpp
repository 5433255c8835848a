#include "slotzero/trainer/targets.hpp"

#include <random>
#include <stdexcept>

#include "slotzero/model/gnn.hpp"
#include "slotzero/util/seed.hpp"

namespace sz::trainer {

bool use_td_branch(std::int64_t iteration, std::int64_t age, const TrainerConfig& config) {
  return iteration < config.t1 || age > config.buffer_capacity - config.t2;
}

double td_return(std::span<const double> rewards, std::optional<double> bootstrap, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double u : rewards) {
    total += discount * u;
    discount *= gamma;
  }
  if (bootstrap) total += discount * *bootstrap;
  return total;
}

namespace {

// Rewards along the TD window and the record whose next_slots bootstrap it (if any).
struct TdWindow {
  std::vector<double> rewards;
  std::optional<std::size_t> bootstrap_from;
};

TdWindow td_window(const ReplayBuffer& buffer, std::size_t index, int steps) {
  TdWindow w;
  for (int i = 0; i < steps; ++i) {
    if (!buffer.same_episode(index, static_cast<std::size_t>(i))) {
      throw std::logic_error("td_window: episode is not contiguous in the buffer");
    }
    const auto& r = buffer.at(index + static_cast<std::size_t>(i));
    w.rewards.push_back(r.reward);
    if (r.ends_episode()) return w;
  }
  w.bootstrap_from = index + static_cast<std::size_t>(steps) - 1;
  return w;
}

// Action fed to the dynamics on an absorbing row; spread over the action space so the
// model learns that every action from a contact state earns nothing.
model::ModelAction absorbing_action(const model::ActionSpec& spec, std::size_t index, std::size_t k) {
  const std::uint64_t h = derive_seed(index, {k});
  if (!spec.continuous) return static_cast<int>(h % static_cast<std::uint64_t>(spec.num_actions));
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(spec.action_dim));
  for (auto& x : a) x = box(rng);
  return a;
}

}  // namespace

ValueTarget value_target(const ReplayBuffer& buffer, std::size_t index, std::int64_t iteration,
                         const TrainerConfig& config, const ValueFn& value_of) {
  ValueTarget out;
  out.decision.iteration = iteration;
  out.decision.age = buffer.age(index);
  if (!use_td_branch(iteration, out.decision.age, config)) {
    out.decision.branch = ValueBranch::search;
    out.value = buffer.at(index).search_value;
    return out;
  }
  out.decision.branch = ValueBranch::td;
  const auto w = td_window(buffer, index, config.td_steps);
  std::optional<double> boot;
  if (w.bootstrap_from) boot = value_of(buffer.at(*w.bootstrap_from).next_slots);
  out.value = td_return(w.rewards, boot, config.gamma);
  return out;
}

TrainTargets build_targets(const ReplayBuffer& buffer, std::span<const std::size_t> indices,
                           const model::ModelParams& params, std::int64_t iteration,
                           const TrainerConfig& config) {
  if (indices.empty()) throw std::invalid_argument("build_targets: empty batch");
  const auto& spec = params.config.action;
  const auto& first = buffer.at(indices[0]);
  const std::size_t k_slots = first.slots.slots();
  const std::size_t dim = first.slots.dim();
  const std::size_t per_slots = k_slots * dim;
  const std::size_t adim = static_cast<std::size_t>(spec.action_dim);

  TrainTargets t;
  t.batch = indices.size();
  t.unroll = static_cast<std::size_t>(config.unroll_steps);
  t.width = spec.continuous ? first.candidates.size() : static_cast<std::size_t>(spec.num_actions);
  const std::size_t rows = t.batch * t.unroll;
  t.actions.resize(rows);
  t.reward.assign(rows, 0.0);
  t.value.assign(rows, 0.0);
  t.policy.assign(rows * t.width, 0.0);
  if (spec.continuous) t.candidates.assign(rows * t.width * adim, 0.0);
  t.next_slots.assign(rows * per_slots, 0.0);
  t.mask.assign(rows, 0);
  t.transition_mask.assign(rows, 0);
  t.value_mask.assign(rows, 0);
  std::vector<char> absorbed(t.batch, 0);

  std::vector<double> initial(t.batch * per_slots);
  for (std::size_t b = 0; b < t.batch; ++b) {
    const auto v = buffer.at(indices[b]).slots.values();
    std::copy(v.begin(), v.end(), initial.begin() + static_cast<std::ptrdiff_t>(b * per_slots));
  }
  t.initial = Tensor({t.batch, k_slots, dim}, std::move(initial));

  // Pass 1: everything except TD bootstraps, which are batched through the value head.
  struct Pending {
    std::size_t row;
    std::vector<double> rewards;
    std::size_t bootstrap_from;
  };
  std::vector<Pending> pending;
  for (std::size_t k = 0; k < t.unroll; ++k) {
    for (std::size_t b = 0; b < t.batch; ++b) {
      const std::size_t row = t.row(k, b);
      const std::size_t idx = indices[b] + k;
      if (spec.continuous) {
        t.actions[row] = std::vector<double>(adim, 0.0);
      } else {
        t.actions[row] = 0;
      }
      if (!buffer.same_episode(indices[b], k)) {
        if (config.absorbing_terminal && absorbed[b]) {
          t.transition_mask[row] = 1;
          t.value_mask[row] = 1;
          t.actions[row] = absorbing_action(spec, indices[b], k);
        }
        continue;
      }
      const auto& rec = buffer.at(idx);
      if (rec.done) absorbed[b] = 1;
      t.mask[row] = 1;
      t.transition_mask[row] = 1;
      t.value_mask[row] = 1;
      t.actions[row] = rec.action;
      t.reward[row] = rec.reward;
      if (rec.policy.size() != t.width) throw std::logic_error("build_targets: policy width mismatch");
      std::copy(rec.policy.begin(), rec.policy.end(),
                t.policy.begin() + static_cast<std::ptrdiff_t>(row * t.width));
      if (spec.continuous) {
        for (std::size_t c = 0; c < t.width; ++c) {
          const auto& cand = std::get<std::vector<double>>(rec.candidates[c]);
          std::copy(cand.begin(), cand.end(),
                    t.candidates.begin() + static_cast<std::ptrdiff_t>((row * t.width + c) * adim));
        }
      }
      const auto nv = rec.next_slots.values();
      std::copy(nv.begin(), nv.end(), t.next_slots.begin() + static_cast<std::ptrdiff_t>(row * per_slots));

      BranchDecision d{iteration, buffer.age(idx), ValueBranch::td};
      if (!use_td_branch(iteration, d.age, config)) {
        d.branch = ValueBranch::search;
        t.value[row] = rec.search_value;
      } else {
        auto w = td_window(buffer, idx, config.td_steps);
        if (w.bootstrap_from) {
          pending.push_back({row, std::move(w.rewards), *w.bootstrap_from});
        } else {
          t.value[row] = td_return(w.rewards, std::nullopt, config.gamma);
        }
      }
      t.decisions.push_back(d);
    }
  }

  if (!pending.empty()) {
    std::vector<slots::SlotSet> boots;
    boots.reserve(pending.size());
    for (const auto& p : pending) boots.push_back(buffer.at(p.bootstrap_from).next_slots);
    const Tensor v = model::predict_value(params, model::to_tensor(boots));
    for (std::size_t i = 0; i < pending.size(); ++i) {
      t.value[pending[i].row] = td_return(pending[i].rewards, v[i], config.gamma);
    }
  }
  return t;
}

}  // namespace sz::trainer
