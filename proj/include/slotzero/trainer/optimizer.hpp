#pragma once

#include <cstdint>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/trainer/config.hpp"

namespace sz::trainer {

/// First and second moment estimates, one vector per parameter tensor in ModelParams::named() order.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t steps = 0;

  static AdamState zeros_like(const model::ModelParams& params);
  bool operator==(const AdamState&) const = default;
};

/// sqrt of the sum of squared gradient entries over every parameter.
double global_grad_norm(const model::ModelParams& params);

/// Rescales all gradients so their global norm is at most max_norm. Returns the norm before clipping.
double clip_grad_norm(const model::ModelParams& params, double max_norm);

/// One bias-corrected Adam update from the gradients currently held by `params`.
void adam_step(model::ModelParams& params, AdamState& state, const TrainerConfig& config);

}  // namespace sz::trainer
