#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "slotzero/tensor/tensor.hpp"

namespace sz::model {

/// A move index, or a continuous action in normalised units [-1, 1]^d.
using ModelAction = std::variant<int, std::vector<double>>;

struct ActionSpec {
  bool continuous = false;
  int num_actions = 5;  // discrete
  int action_dim = 2;   // continuous
  bool operator==(const ActionSpec&) const = default;

  int policy_width() const { return continuous ? 2 * action_dim : num_actions; }
};

struct ModelConfig {
  int slot_dim = 16;
  int hidden = 64;
  int action_embed = 8;
  ActionSpec action;
  // Node output of the dynamics model is added to the input slot when set.
  bool residual_dynamics = true;
  bool operator==(const ModelConfig&) const = default;
};

void validate(const ModelConfig& config);

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Three affine layers, tanh after the first two.
struct Mlp {
  Tensor w0, b0, w1, b1, w2, b2;

  int in_width() const { return static_cast<int>(w0.dim(0)); }
  int out_width() const { return static_cast<int>(w2.dim(1)); }
};

Tensor forward(const Mlp& mlp, const Tensor& x);

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Every learnable weight of the world model.
///
/// Dynamics: edge_T / node_T. Each of the reward, value and policy heads has its own
/// edge and node networks plus a readout MLP over the summed node embeddings; no
/// weights are shared between heads or with the dynamics.
struct ModelParams {
  ModelConfig config;
  Mlp edge_dynamics, node_dynamics;
  Mlp edge_reward, node_reward, readout_reward;
  Mlp edge_value, node_value, readout_value;
  Mlp edge_policy, node_policy, readout_policy;
  // [num_actions, action_embed] lookup table, or [action_dim, action_embed] projection.
  Tensor action_embedding;

  /// Stable order; names are used by checkpoints and the gradient sweep.
  std::vector<NamedTensor> named() const;
  std::size_t parameter_count() const;
  ModelParams clone() const;
  bool all_finite() const;
  /// FNV-1a over the raw parameter bytes, reported in numeric fault messages.
  std::uint64_t fingerprint() const;
};

/// Closed form; see docs/model.md for the per-layer breakdown.
std::size_t expected_parameter_count(const ModelConfig& config);

/// Weights draw U(-b, b) with b = sqrt(6 / (fan_in + fan_out)); biases start at zero; the
/// last layer of every readout (value, reward, policy) is zero so that value and
/// reward start at 0 and the policy starts uniform.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

void zero_grads(const ModelParams& params);

class NumericFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sz::model
