#include "slotzero/trainer/loss.hpp"

#include "slotzero/model/gaussian.hpp"
#include "slotzero/model/gnn.hpp"
#include "slotzero/tensor/ops.hpp"

namespace sz::trainer {

namespace {

struct StepTargets {
  Tensor mask;
  Tensor transition_mask;
  Tensor value_mask;
  Tensor reward;
  Tensor value;
  Tensor policy;
  Tensor candidates;
  Tensor next;
  std::vector<model::ModelAction> actions;
};

StepTargets step_targets(const TrainTargets& t, std::size_t k, const model::ActionSpec& spec,
                         std::size_t k_slots, std::size_t dim) {
  const std::size_t b_n = t.batch;
  const std::size_t w = t.width;
  const std::size_t per = k_slots * dim;
  const std::size_t adim = static_cast<std::size_t>(spec.action_dim);
  std::vector<double> mask(b_n), tmask(b_n), vmask(b_n), reward(b_n), value(b_n), policy(b_n * w),
      next(b_n * per), cand(spec.continuous ? b_n * w * adim : 0);
  StepTargets s;
  s.actions.resize(b_n);
  for (std::size_t b = 0; b < b_n; ++b) {
    const std::size_t row = t.row(k, b);
    const bool on = t.mask[row] != 0;
    const bool ton = t.transition_mask[row] != 0;
    const bool von = t.value_mask[row] != 0;
    mask[b] = on ? 1.0 : 0.0;
    tmask[b] = ton ? 1.0 : 0.0;
    vmask[b] = von ? 1.0 : 0.0;
    if (von) value[b] = t.value[row];
    if (ton) reward[b] = t.reward[row];
    if (ton) {
      s.actions[b] = t.actions[row];
    } else if (spec.continuous) {
      s.actions[b] = model::ModelAction(std::vector<double>(adim, 0.0));
    } else {
      s.actions[b] = model::ModelAction(0);
    }
    if (ton) {
      for (std::size_t i = 0; i < per; ++i) next[b * per + i] = t.next_slots[row * per + i];
    }
    if (!on) continue;
    for (std::size_t a = 0; a < w; ++a) policy[b * w + a] = t.policy[row * w + a];
    for (std::size_t i = 0; i < w * adim && spec.continuous; ++i) {
      cand[b * w * adim + i] = t.candidates[row * w * adim + i];
    }
  }
  s.mask = Tensor({b_n}, std::move(mask));
  s.transition_mask = Tensor({b_n}, std::move(tmask));
  s.value_mask = Tensor({b_n}, std::move(vmask));
  s.reward = Tensor({b_n}, std::move(reward));
  s.value = Tensor({b_n}, std::move(value));
  s.policy = Tensor({b_n, w}, std::move(policy));
  s.next = Tensor({b_n, k_slots, dim}, std::move(next));
  if (spec.continuous) s.candidates = Tensor({b_n * w, adim}, std::move(cand));
  return s;
}

Tensor masked_sum(const Tensor& per_row, const Tensor& mask) {
  return ops::sum_all(ops::mul(per_row, mask));
}

// 1 - cos(a, b) per batch row over the flattened slot set.
Tensor cosine_distance(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.dim(0);
  const std::size_t width = a.numel() / n;
  const Tensor fa = ops::reshape(a, {n, width});
  const Tensor fb = ops::reshape(b, {n, width});
  auto inv_norm = [](const Tensor& x) {
    return ops::exp(ops::scale(ops::log(ops::add_scalar(ops::sum(ops::square(x), 1), 1e-12)), -0.5));
  };
  const Tensor cos = ops::mul(ops::mul(ops::sum(ops::mul(fa, fb), 1), inv_norm(fa)), inv_norm(fb));
  return ops::add_scalar(ops::scale(cos, -1.0), 1.0);
}

}  // namespace

LossBreakdown compute_loss(const model::ModelParams& params, const TrainTargets& targets,
                           const TrainerConfig& config) {
  const auto& spec = params.config.action;
  const std::size_t k_slots = targets.initial.dim(1);
  const std::size_t dim = targets.initial.dim(2);
  const double norm = 1.0 / static_cast<double>(targets.batch * targets.unroll);

  std::vector<Tensor> reward_terms, policy_terms, value_terms, consistency_terms;
  Tensor cur = targets.initial;
  model::HeadTensors heads = model::predict_heads(params, cur);
  for (std::size_t k = 0; k < targets.unroll; ++k) {
    const StepTargets s = step_targets(targets, k, spec, k_slots, dim);

    value_terms.push_back(masked_sum(ops::square(ops::sub(heads.value, s.value)), s.value_mask));

    Tensor log_prob;
    if (spec.continuous) {
      log_prob = ops::reshape(
          model::gaussian_log_density(heads.mean, heads.log_std, s.candidates, targets.width),
          {targets.batch, targets.width});
    } else {
      log_prob = ops::log_softmax(heads.logits, 1);
    }
    const Tensor ce = ops::scale(ops::sum(ops::mul(s.policy, log_prob), 1), -1.0);
    policy_terms.push_back(masked_sum(ce, s.mask));

    const Tensor next = model::dynamics_step(params, cur, model::ActionBatch::from(s.actions));
    heads = model::predict_heads(params, next);
    reward_terms.push_back(masked_sum(ops::square(ops::sub(heads.reward, s.reward)), s.transition_mask));

    Tensor gap;
    if (config.consistency == ConsistencyLoss::mse) {
      gap = ops::mean(ops::sum(ops::square(ops::sub(next, s.next)), 2), 1);
    } else {
      gap = cosine_distance(next, s.next);
    }
    consistency_terms.push_back(masked_sum(gap, s.transition_mask));
    cur = next;
  }

  auto total_of = [&](const std::vector<Tensor>& terms) {
    Tensor sum = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) sum = ops::add(sum, terms[i]);
    return ops::scale(sum, norm);
  };
  const Tensor lr = total_of(reward_terms);
  const Tensor lp = total_of(policy_terms);
  const Tensor lv = total_of(value_terms);
  const Tensor lg = total_of(consistency_terms);

  LossBreakdown out;
  out.reward = lr.item();
  out.policy = lp.item();
  out.value = lv.item();
  out.consistency = lg.item();
  out.total = ops::add(ops::add(ops::scale(lr, config.lambda_reward), ops::scale(lp, config.lambda_policy)),
                       ops::add(ops::scale(lv, config.lambda_value),
                                ops::scale(lg, config.lambda_consistency)));
  return out;
}

}  // namespace sz::trainer
