#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/slots/encoder.hpp"

namespace sz::model {

/// Actions for a batch: move indices (discrete) or row-major [batch, action_dim] values.
struct ActionBatch {
  std::vector<int> indices;
  std::vector<double> vectors;

  static ActionBatch from(std::span<const ModelAction> actions);
  std::size_t size(const ActionSpec& spec) const;
};

/// Counts rows pushed through edge networks; lets tests check the K*(K-1) cost.
struct GnnStats {
  std::size_t edge_rows = 0;
  std::size_t node_rows = 0;
};

struct HeadTensors {
  Tensor reward;  // [B]
  Tensor value;   // [B]
  Tensor logits;  // [B, num_actions]   (discrete)
  Tensor mean;    // [B, action_dim]    (continuous)
  Tensor log_std; // [B, action_dim], clamped to [kLogStdMin, kLogStdMax]
};

/// One round of message passing over the fully connected slot graph:
///   next_i = node_T(s_i, a, sum_{j != i} edge_T(s_i, s_j, a))
/// plus s_i when residual_dynamics is set. `slots` is [B, K, D]; the result has the
/// same shape and is permutation-equivariant in K.
Tensor dynamics_step(const ModelParams& params, const Tensor& slots, const ActionBatch& actions,
                     GnnStats* stats = nullptr);

/// Reward, value and policy readouts; each sums its node embeddings over slots, so
/// all outputs are invariant to slot order.
HeadTensors predict_heads(const ModelParams& params, const Tensor& slots,
                          GnnStats* stats = nullptr);

/// Value head only; used for bootstrap targets.
Tensor predict_value(const ModelParams& params, const Tensor& slots);

struct HeadOutputs {
  double reward = 0.0;
  double value = 0.0;
  std::vector<double> logits;
  std::vector<double> mean;
  std::vector<double> log_std;
};

// Single-sample conveniences over the batched forms (no gradient tracking intended).
slots::SlotSet dynamics_step(const ModelParams& params, const slots::SlotSet& slots,
                             const ModelAction& action);
HeadOutputs predict_heads(const ModelParams& params, const slots::SlotSet& slots);

Tensor to_tensor(std::span<const slots::SlotSet> batch);
slots::SlotSet to_slot_set(const Tensor& slots, std::size_t batch_index = 0);

}  // namespace sz::model
