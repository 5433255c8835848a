#pragma once

#include "slotzero/model/params.hpp"
#include "slotzero/tensor/tensor.hpp"
#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/targets.hpp"

namespace sz::trainer {

/// The weighted total (differentiable) and each unweighted term.
struct LossBreakdown {
  Tensor total;
  double reward = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double consistency = 0.0;
};

/// Unrolls the dynamics unroll_steps times from the sampled slots. Step k scores value and
/// policy at s_{t+k}, the reward head at s_{t+k+1} against u_{t+k}, and s_{t+k+1} against the
/// observed next slots. Each term is summed over unmasked rows and divided by batch * unroll.
/// Masked rows never read their targets.
LossBreakdown compute_loss(const model::ModelParams& params, const TrainTargets& targets,
                           const TrainerConfig& config);

}  // namespace sz::trainer
