#include "slotzero/verify/grad_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "slotzero/tensor/tape.hpp"
#include "slotzero/trainer/loss.hpp"
#include "slotzero/trainer/replay.hpp"

namespace sz::verify {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

GradReport grad_sweep(std::span<const model::NamedTensor> params, const LossFn& loss,
                      double tolerance, double h, const std::function<void()>& after_backward) {
  for (const auto& p : params) {
    Tensor t = p.tensor;
    t.zero_grad();
  }
  {
    Tape tape;
    TapeScope scope(tape);
    tape.backward(loss());
  }
  if (after_backward) after_backward();

  GradReport report;
  report.tolerance = tolerance;
  for (const auto& p : params) {
    Tensor t = p.tensor;
    std::vector<double> analytic(t.numel(), 0.0);
    if (t.has_grad()) std::copy(t.grad().begin(), t.grad().end(), analytic.begin());
    TensorReport tr;
    tr.name = p.name;
    auto w = t.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + h;
      const double up = loss().item();
      w[i] = saved - h;
      const double down = loss().item();
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[i], numeric);
      if (err > tr.max_rel_error || i == 0) {
        tr.max_rel_error = err;
        tr.worst_index = i;
        tr.analytic = analytic[i];
        tr.numeric = numeric;
      }
    }
    if (tr.max_rel_error > report.max_rel_error || report.worst.empty()) {
      report.max_rel_error = tr.max_rel_error;
      report.worst = tr.name;
    }
    if (tr.max_rel_error >= tolerance) report.failing.push_back(tr.name);
    report.tensors.push_back(std::move(tr));
  }
  return report;
}

LossFixture make_loss_fixture(const FixtureSpec& spec, std::uint64_t seed) {
  model::ModelConfig mc;
  mc.slot_dim = spec.slot_dim;
  mc.hidden = spec.hidden;
  mc.action_embed = 3;
  mc.action.continuous = spec.continuous;
  LossFixture fx;
  fx.params = model::init_params(mc, seed);
  std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const auto& p : fx.params.named()) {
    Tensor t = p.tensor;
    for (double& w : t.mutable_values()) w += u(rng);
  }

  fx.config.unroll_steps = spec.unroll;
  fx.config.td_steps = 2;
  fx.config.gamma = 0.9;
  fx.config.consistency = spec.consistency;
  fx.config.lambda_reward = 1.0;
  fx.config.lambda_policy = 1.0;
  fx.config.lambda_value = 0.25;
  fx.config.lambda_consistency = 2.0;

  const auto k = static_cast<std::size_t>(spec.slots);
  const auto d = static_cast<std::size_t>(spec.slot_dim);
  std::normal_distribution<double> normal(0.0, 0.5);
  auto random_slots = [&] {
    slots::SlotSet s(k, d);
    for (double& v : s.storage()) v = normal(rng);
    return s;
  };
  const int length = spec.unroll + 2;
  std::vector<slots::SlotSet> obs;
  for (int i = 0; i <= length; ++i) obs.push_back(random_slots());
  trainer::ReplayBuffer buffer(64);
  std::vector<trainer::TransitionRecord> episode;
  for (int i = 0; i < length; ++i) {
    trainer::TransitionRecord r;
    r.slots = obs[static_cast<std::size_t>(i)];
    r.next_slots = obs[static_cast<std::size_t>(i) + 1];
    r.reward = std::abs(u(rng));
    r.done = i + 1 == length;
    r.search_value = u(rng);
    r.position = i;
    const std::size_t width = spec.continuous ? static_cast<std::size_t>(spec.candidates) : 5;
    std::vector<double> pi(width);
    double total = 0.0;
    for (auto& p : pi) total += (p = 0.1 + std::abs(u(rng)));
    for (auto& p : pi) p /= total;
    r.policy = pi;
    if (spec.continuous) {
      for (std::size_t c = 0; c < width; ++c) r.candidates.emplace_back(std::vector<double>{u(rng), u(rng)});
      r.action = r.candidates.front();
    } else {
      r.action = static_cast<int>(rng() % 5);
    }
    episode.push_back(std::move(r));
  }
  buffer.insert_episode(std::move(episode));
  // First record unrolls fully; the last one runs past the episode end and exercises masks.
  const std::vector<std::size_t> batch{0, buffer.size() - 1};
  fx.targets = trainer::build_targets(buffer, batch, fx.params, 0, fx.config);
  return fx;
}

GradReport sweep_training_loss(const FixtureSpec& spec, std::uint64_t seed, double tolerance) {
  const LossFixture fx = make_loss_fixture(spec, seed);
  const auto named = fx.params.named();
  return grad_sweep(named, [&] { return trainer::compute_loss(fx.params, fx.targets, fx.config).total; },
                    tolerance);
}

}  // namespace sz::verify
