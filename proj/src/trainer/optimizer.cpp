#include "slotzero/trainer/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace sz::trainer {

AdamState AdamState::zeros_like(const model::ModelParams& params) {
  AdamState s;
  for (const auto& p : params.named()) {
    s.m.emplace_back(p.tensor.numel(), 0.0);
    s.v.emplace_back(p.tensor.numel(), 0.0);
  }
  return s;
}

double global_grad_norm(const model::ModelParams& params) {
  double sq = 0.0;
  for (const auto& p : params.named()) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(const model::ModelParams& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (const auto& p : params.named()) {
      if (!p.tensor.has_grad()) continue;
      Tensor t = p.tensor;
      for (double& g : t.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

void adam_step(model::ModelParams& params, AdamState& state, const TrainerConfig& config) {
  auto named = params.named();
  if (state.m.size() != named.size()) throw std::logic_error("adam_step: state does not match params");
  state.steps += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.steps));
  for (std::size_t i = 0; i < named.size(); ++i) {
    Tensor t = named[i].tensor;
    if (!t.has_grad()) continue;
    const auto g = t.grad();
    auto w = t.mutable_values();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      w[j] -= config.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + config.adam_epsilon);
    }
  }
}

}  // namespace sz::trainer
