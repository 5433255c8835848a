#include <cmath>
#include <cstring>
#include <random>

#include "slotzero/model/params.hpp"

namespace sz::model {

void validate(const ModelConfig& c) {
  if (c.slot_dim < 1) throw std::invalid_argument("model.slot_dim must be >= 1");
  if (c.hidden < 1) throw std::invalid_argument("model.hidden must be >= 1");
  if (c.action_embed < 1) throw std::invalid_argument("model.action_embed must be >= 1");
  if (!c.action.continuous && c.action.num_actions < 1) {
    throw std::invalid_argument("model.num_actions must be >= 1");
  }
  if (c.action.continuous && c.action.action_dim < 1) {
    throw std::invalid_argument("model.action_dim must be >= 1");
  }
}

namespace {

std::size_t mlp_count(std::size_t in, std::size_t hidden, std::size_t out) {
  return in * hidden + hidden + hidden * hidden + hidden + hidden * out + out;
}

Tensor uniform(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = dist(rng);
  return Tensor({rows, cols}, std::move(v), true);
}

Mlp make_mlp(std::mt19937_64& rng, std::size_t in, std::size_t hidden, std::size_t out,
             bool zero_last) {
  Mlp m;
  m.w0 = uniform(rng, in, hidden);
  m.b0 = Tensor::zeros({hidden}, true);
  m.w1 = uniform(rng, hidden, hidden);
  m.b1 = Tensor::zeros({hidden}, true);
  m.w2 = zero_last ? Tensor::zeros({hidden, out}, true) : uniform(rng, hidden, out);
  m.b2 = Tensor::zeros({out}, true);
  return m;
}

void append(std::vector<NamedTensor>& out, const std::string& prefix, const Mlp& m) {
  out.push_back({prefix + ".w0", m.w0});
  out.push_back({prefix + ".b0", m.b0});
  out.push_back({prefix + ".w1", m.w1});
  out.push_back({prefix + ".b1", m.b1});
  out.push_back({prefix + ".w2", m.w2});
  out.push_back({prefix + ".b2", m.b2});
}

Mlp clone_mlp(const Mlp& m) {
  return {m.w0.clone(), m.b0.clone(), m.w1.clone(), m.b1.clone(), m.w2.clone(), m.b2.clone()};
}

}  // namespace

std::size_t expected_parameter_count(const ModelConfig& c) {
  const std::size_t d = c.slot_dim;
  const std::size_t h = c.hidden;
  const std::size_t e = c.action_embed;
  const std::size_t action_rows = c.action.continuous ? c.action.action_dim : c.action.num_actions;
  std::size_t total = mlp_count(2 * d + e, h, h) + mlp_count(d + e + h, h, d);
  total += 3 * (mlp_count(2 * d, h, h) + mlp_count(d + h, h, h));
  total += 2 * mlp_count(h, h, 1) + mlp_count(h, h, c.action.policy_width());
  total += action_rows * e;
  return total;
}

ModelParams init_params(const ModelConfig& c, std::uint64_t seed) {
  validate(c);
  std::mt19937_64 rng(seed);
  const std::size_t d = c.slot_dim;
  const std::size_t h = c.hidden;
  const std::size_t e = c.action_embed;
  ModelParams p;
  p.config = c;
  p.edge_dynamics = make_mlp(rng, 2 * d + e, h, h, false);
  p.node_dynamics = make_mlp(rng, d + e + h, h, d, false);
  p.edge_reward = make_mlp(rng, 2 * d, h, h, false);
  p.node_reward = make_mlp(rng, d + h, h, h, false);
  p.readout_reward = make_mlp(rng, h, h, 1, true);
  p.edge_value = make_mlp(rng, 2 * d, h, h, false);
  p.node_value = make_mlp(rng, d + h, h, h, false);
  p.readout_value = make_mlp(rng, h, h, 1, true);
  p.edge_policy = make_mlp(rng, 2 * d, h, h, false);
  p.node_policy = make_mlp(rng, d + h, h, h, false);
  p.readout_policy = make_mlp(rng, h, h, c.action.policy_width(), true);
  const std::size_t rows = c.action.continuous ? c.action.action_dim : c.action.num_actions;
  if (c.action.continuous) {
    p.action_embedding = uniform(rng, rows, e);
  } else {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(rows * e);
    for (auto& x : v) x = dist(rng);
    p.action_embedding = Tensor({rows, e}, std::move(v), true);
  }
  return p;
}

std::vector<NamedTensor> ModelParams::named() const {
  std::vector<NamedTensor> out;
  append(out, "edge_dynamics", edge_dynamics);
  append(out, "node_dynamics", node_dynamics);
  append(out, "edge_reward", edge_reward);
  append(out, "node_reward", node_reward);
  append(out, "readout_reward", readout_reward);
  append(out, "edge_value", edge_value);
  append(out, "node_value", node_value);
  append(out, "readout_value", readout_value);
  append(out, "edge_policy", edge_policy);
  append(out, "node_policy", node_policy);
  append(out, "readout_policy", readout_policy);
  out.push_back({"action_embedding", action_embedding});
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : named()) n += t.tensor.numel();
  return n;
}

ModelParams ModelParams::clone() const {
  ModelParams p;
  p.config = config;
  p.edge_dynamics = clone_mlp(edge_dynamics);
  p.node_dynamics = clone_mlp(node_dynamics);
  p.edge_reward = clone_mlp(edge_reward);
  p.node_reward = clone_mlp(node_reward);
  p.readout_reward = clone_mlp(readout_reward);
  p.edge_value = clone_mlp(edge_value);
  p.node_value = clone_mlp(node_value);
  p.readout_value = clone_mlp(readout_value);
  p.edge_policy = clone_mlp(edge_policy);
  p.node_policy = clone_mlp(node_policy);
  p.readout_policy = clone_mlp(readout_policy);
  p.action_embedding = action_embedding.clone();
  return p;
}

bool ModelParams::all_finite() const {
  for (const auto& t : named()) {
    for (double v : t.tensor.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::uint64_t ModelParams::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : named()) {
    for (double v : t.tensor.values()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

void zero_grads(const ModelParams& params) {
  for (auto& t : params.named()) {
    auto tensor = t.tensor;
    tensor.zero_grad();
  }
}

}  // namespace sz::model
