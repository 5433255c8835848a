#include "slotzero/trainer/step.hpp"

#include <cmath>
#include <random>

#include "slotzero/tensor/tape.hpp"
#include "slotzero/trainer/loss.hpp"

namespace sz::trainer {

namespace {

bool grads_finite(const model::ModelParams& params) {
  for (const auto& p : params.named()) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad()) {
      if (!std::isfinite(g)) return false;
    }
  }
  return true;
}

}  // namespace

TrainStepResult train_on_targets(const TrainTargets& targets, model::ModelParams& params,
                                 AdamState& adam, const TrainerConfig& config) {
  TrainStepResult r;
  r.decisions = targets.decisions;
  for (const auto& d : targets.decisions) {
    (d.branch == ValueBranch::td ? r.td_branch : r.search_branch) += 1;
  }
  model::zero_grads(params);
  try {
    Tape tape;
    TapeScope scope(tape);
    const LossBreakdown loss = compute_loss(params, targets, config);
    r.loss_total = loss.total.item();
    r.loss_reward = loss.reward;
    r.loss_policy = loss.policy;
    r.loss_value = loss.value;
    r.loss_consistency = loss.consistency;
    if (!std::isfinite(r.loss_total)) {
      r.fault = true;
      r.fault_message = "non-finite loss";
    } else {
      tape.backward(loss.total);
    }
  } catch (const model::NumericFault& e) {
    r.fault = true;
    r.fault_message = e.what();
  } catch (const DomainError& e) {
    r.fault = true;
    r.fault_message = e.what();
  }
  if (!r.fault && !grads_finite(params)) {
    r.fault = true;
    r.fault_message = "non-finite gradient";
  }
  if (r.fault) {
    model::zero_grads(params);
    return r;
  }
  r.grad_norm = clip_grad_norm(params, config.max_grad_norm);
  adam_step(params, adam, config);
  model::zero_grads(params);
  r.applied = true;
  return r;
}

TrainStepResult train_step(const ReplayBuffer& buffer, model::ModelParams& params, AdamState& adam,
                           std::int64_t iteration, const TrainerConfig& config,
                           std::uint64_t batch_seed) {
  std::mt19937_64 rng(batch_seed);
  const auto batch = buffer.sample(static_cast<std::size_t>(config.batch_size), rng);
  TrainStepResult r;
  try {
    const TrainTargets targets = build_targets(buffer, batch, params, iteration, config);
    r = train_on_targets(targets, params, adam, config);
  } catch (const model::NumericFault& e) {
    r.fault = true;
    r.fault_message = e.what();
  }
  r.batch = batch;
  if (r.fault) {
    std::string ids;
    for (std::size_t i = 0; i < batch.size() && i < 16; ++i) {
      ids += (i ? "," : "") + std::to_string(buffer.insertion_index(batch[i]));
    }
    r.fault_message += " (iteration " + std::to_string(iteration) + ", records " + ids +
                       (batch.size() > 16 ? ",...)" : ")");
  }
  return r;
}

}  // namespace sz::trainer
