#include "slotzero/model/gnn.hpp"

#include <cmath>
#include <sstream>

#include "slotzero/tensor/ops.hpp"

namespace sz::model {

ActionBatch ActionBatch::from(std::span<const ModelAction> actions) {
  ActionBatch batch;
  for (const auto& a : actions) {
    if (const int* index = std::get_if<int>(&a)) {
      batch.indices.push_back(*index);
    } else {
      const auto& v = std::get<std::vector<double>>(a);
      batch.vectors.insert(batch.vectors.end(), v.begin(), v.end());
    }
  }
  return batch;
}

std::size_t ActionBatch::size(const ActionSpec& spec) const {
  return spec.continuous ? vectors.size() / static_cast<std::size_t>(spec.action_dim)
                         : indices.size();
}

namespace {

// Row indices for the directed pairs (receiver i, sender j), i != j, of each sample.
struct GraphIndex {
  std::vector<std::size_t> receiver;
  std::vector<std::size_t> sender;
  std::vector<std::size_t> pair_batch;
  std::vector<std::size_t> node_batch;
};

GraphIndex build_index(std::size_t batch, std::size_t k) {
  GraphIndex g;
  g.receiver.reserve(batch * k * (k - 1));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < k; ++i) {
      g.node_batch.push_back(b);
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        g.receiver.push_back(b * k + i);
        g.sender.push_back(b * k + j);
        g.pair_batch.push_back(b);
      }
    }
  }
  return g;
}

void check_finite(const Tensor& t, const ModelParams& params, const char* where) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite value in " << where << " (params fingerprint " << std::hex
          << params.fingerprint() << ")";
      throw NumericFault(msg.str());
    }
  }
}

void check_slots(const Tensor& slots, const ModelParams& params) {
  if (slots.rank() != 3 || slots.dim(2) != static_cast<std::size_t>(params.config.slot_dim)) {
    throw ShapeError("expected slots [B, K, " + std::to_string(params.config.slot_dim) + "], got " +
                     shape_string(slots.shape()));
  }
}

// Aggregated messages sum_{j != i} edge(s_i, s_j [, a]) as [B*K, message width].
Tensor aggregate(const Mlp& edge, const Tensor& flat, const GraphIndex& g,
                 const Tensor* action_rows, std::size_t nodes, GnnStats* stats) {
  if (g.receiver.empty()) return Tensor::zeros({nodes, static_cast<std::size_t>(edge.out_width())});
  std::vector<Tensor> parts{ops::gather_rows(flat, g.receiver), ops::gather_rows(flat, g.sender)};
  if (action_rows != nullptr) parts.push_back(ops::gather_rows(*action_rows, g.pair_batch));
  const Tensor messages = forward(edge, ops::concat(std::span<const Tensor>(parts), 1));
  if (stats != nullptr) stats->edge_rows += g.receiver.size();
  return ops::scatter_add_rows(messages, g.receiver, nodes);
}

Tensor action_features(const ModelParams& p, const ActionBatch& actions, std::size_t batch) {
  const auto& spec = p.config.action;
  if (actions.size(spec) != batch) {
    throw ShapeError("dynamics_step: " + std::to_string(actions.size(spec)) + " actions for batch " +
                     std::to_string(batch));
  }
  if (spec.continuous) {
    const Tensor u({batch, static_cast<std::size_t>(spec.action_dim)}, actions.vectors);
    return ops::matmul(u, p.action_embedding);
  }
  std::vector<std::size_t> rows;
  rows.reserve(batch);
  for (int a : actions.indices) {
    if (a < 0 || a >= spec.num_actions) throw std::invalid_argument("action index out of range");
    rows.push_back(static_cast<std::size_t>(a));
  }
  return ops::gather_rows(p.action_embedding, rows);
}

// Shared body of the three readouts: pooled node embeddings -> readout MLP, [B, out].
Tensor readout(const Mlp& edge, const Mlp& node, const Mlp& head, const Tensor& flat,
               const GraphIndex& g, std::size_t batch, std::size_t k, GnnStats* stats) {
  const std::size_t nodes = batch * k;
  const Tensor agg = aggregate(edge, flat, g, nullptr, nodes, stats);
  const Tensor embed = forward(node, ops::concat({flat, agg}, 1));
  if (stats != nullptr) stats->node_rows += nodes;
  const Tensor pooled = ops::sum(ops::reshape(embed, {batch, k, embed.dim(1)}), 1);
  return forward(head, pooled);
}

}  // namespace

Tensor dynamics_step(const ModelParams& params, const Tensor& slots, const ActionBatch& actions,
                     GnnStats* stats) {
  check_slots(slots, params);
  const std::size_t batch = slots.dim(0);
  const std::size_t k = slots.dim(1);
  const std::size_t d = slots.dim(2);
  const std::size_t nodes = batch * k;
  const GraphIndex g = build_index(batch, k);

  const Tensor flat = ops::reshape(slots, {nodes, d});
  const Tensor act = action_features(params, actions, batch);
  const Tensor agg = aggregate(params.edge_dynamics, flat, g, &act, nodes, stats);
  const Tensor node_in = ops::concat({flat, ops::gather_rows(act, g.node_batch), agg}, 1);
  Tensor next = forward(params.node_dynamics, node_in);
  if (stats != nullptr) stats->node_rows += nodes;
  if (params.config.residual_dynamics) next = ops::add(flat, next);
  next = ops::reshape(next, {batch, k, d});
  check_finite(next, params, "dynamics_step");
  return next;
}

HeadTensors predict_heads(const ModelParams& params, const Tensor& slots, GnnStats* stats) {
  check_slots(slots, params);
  const std::size_t batch = slots.dim(0);
  const std::size_t k = slots.dim(1);
  const GraphIndex g = build_index(batch, k);
  const Tensor flat = ops::reshape(slots, {batch * k, slots.dim(2)});

  HeadTensors out;
  out.reward = ops::reshape(readout(params.edge_reward, params.node_reward, params.readout_reward,
                                    flat, g, batch, k, stats),
                            {batch});
  out.value = ops::reshape(readout(params.edge_value, params.node_value, params.readout_value, flat,
                                   g, batch, k, stats),
                           {batch});
  const Tensor policy = readout(params.edge_policy, params.node_policy, params.readout_policy, flat,
                                g, batch, k, stats);
  check_finite(out.reward, params, "reward head");
  check_finite(out.value, params, "value head");
  check_finite(policy, params, "policy head");
  const auto& spec = params.config.action;
  if (spec.continuous) {
    const auto dim = static_cast<std::size_t>(spec.action_dim);
    out.mean = ops::slice(policy, 1, 0, dim);
    out.log_std = ops::clamp(ops::slice(policy, 1, dim, dim), kLogStdMin, kLogStdMax);
  } else {
    out.logits = policy;
  }
  return out;
}

Tensor predict_value(const ModelParams& params, const Tensor& slots) {
  check_slots(slots, params);
  const std::size_t batch = slots.dim(0);
  const std::size_t k = slots.dim(1);
  const GraphIndex g = build_index(batch, k);
  const Tensor flat = ops::reshape(slots, {batch * k, slots.dim(2)});
  Tensor v = ops::reshape(readout(params.edge_value, params.node_value, params.readout_value, flat,
                                  g, batch, k, nullptr),
                          {batch});
  check_finite(v, params, "value head");
  return v;
}

Tensor to_tensor(std::span<const slots::SlotSet> batch) {
  if (batch.empty()) throw ShapeError("to_tensor: empty batch");
  const std::size_t k = batch.front().slots();
  const std::size_t d = batch.front().dim();
  std::vector<double> values;
  values.reserve(batch.size() * k * d);
  for (const auto& s : batch) {
    if (s.slots() != k || s.dim() != d) throw ShapeError("to_tensor: ragged slot sets");
    values.insert(values.end(), s.values().begin(), s.values().end());
  }
  return Tensor({batch.size(), k, d}, std::move(values));
}

slots::SlotSet to_slot_set(const Tensor& slots, std::size_t batch_index) {
  const std::size_t k = slots.dim(1);
  const std::size_t d = slots.dim(2);
  const auto v = slots.values();
  const auto first = v.begin() + static_cast<std::ptrdiff_t>(batch_index * k * d);
  return slots::SlotSet(k, d, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(k * d)));
}

slots::SlotSet dynamics_step(const ModelParams& params, const slots::SlotSet& slots,
                             const ModelAction& action) {
  const Tensor in = to_tensor(std::span<const slots::SlotSet>(&slots, 1));
  const Tensor out = dynamics_step(params, in, ActionBatch::from(std::span<const ModelAction>(&action, 1)));
  return to_slot_set(out);
}

HeadOutputs predict_heads(const ModelParams& params, const slots::SlotSet& slots) {
  const Tensor in = to_tensor(std::span<const slots::SlotSet>(&slots, 1));
  const HeadTensors heads = predict_heads(params, in);
  HeadOutputs out;
  out.reward = heads.reward[0];
  out.value = heads.value[0];
  if (params.config.action.continuous) {
    out.mean.assign(heads.mean.values().begin(), heads.mean.values().end());
    out.log_std.assign(heads.log_std.values().begin(), heads.log_std.values().end());
  } else {
    out.logits.assign(heads.logits.values().begin(), heads.logits.values().end());
  }
  return out;
}

}  // namespace sz::model
