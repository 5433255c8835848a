#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "slotzero/model/gaussian.hpp"
#include "slotzero/model/gnn.hpp"
#include "slotzero/model/params.hpp"
#include "slotzero/tensor/ops.hpp"
#include "slotzero/tensor/tape.hpp"

namespace {

using namespace sz;
using namespace sz::model;

ModelConfig small_config(bool continuous = false) {
  ModelConfig c;
  c.slot_dim = 4;
  c.hidden = 6;
  c.action_embed = 3;
  c.action.continuous = continuous;
  return c;
}

// Moves every weight off its initial value so zero-initialised layers carry gradient.
ModelParams perturbed(const ModelConfig& c, std::uint64_t seed) {
  ModelParams p = init_params(c, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& nt : p.named()) {
    for (auto& v : nt.tensor.mutable_values()) v += u(rng);
  }
  return p;
}

Tensor random_slots(std::size_t b, std::size_t k, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(b * k * d);
  for (auto& x : v) x = n(rng);
  return Tensor({b, k, d}, v);
}

// Max relative error of d loss / d params against central differences.
double param_grad_error(const ModelParams& p, const std::function<Tensor()>& loss) {
  zero_grads(p);
  {
    Tape tape;
    TapeScope scope(tape);
    tape.backward(loss());
  }
  double worst = 0.0;
  const double h = 1e-5;
  for (auto& nt : p.named()) {
    std::vector<double> g(nt.tensor.numel(), 0.0);
    if (nt.tensor.has_grad()) g.assign(nt.tensor.grad().begin(), nt.tensor.grad().end());
    auto vals = nt.tensor.mutable_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      vals[i] = keep + h;
      const double up = loss().item();
      vals[i] = keep - h;
      const double down = loss().item();
      vals[i] = keep;
      const double num = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(g[i] - num) / std::max({std::abs(g[i]), std::abs(num), 1e-6}));
    }
  }
  return worst;
}

Tensor permute_rows(const Tensor& slots, const std::vector<int>& row_of) {
  const std::size_t b = slots.dim(0), k = slots.dim(1), d = slots.dim(2);
  std::vector<double> out(slots.numel());
  for (std::size_t s = 0; s < b; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        out[(s * k + row_of[i]) * d + c] = slots[(s * k + i) * d + c];
      }
    }
  }
  return Tensor(slots.shape(), out);
}

TEST(Params, HandCountedSize) {
  // edge_T 10944 + node_T 10896 + 3 x (edge 10432 + node 13504)
  // + 2 x scalar readout 8385 + policy readout 8645 + embedding 40
  ModelConfig c;
  EXPECT_EQ(expected_parameter_count(c), 119103u);
  EXPECT_EQ(init_params(c, 1).parameter_count(), 119103u);
  const ModelConfig s = small_config(true);
  EXPECT_EQ(init_params(s, 1).parameter_count(), expected_parameter_count(s));
}

TEST(Params, DeterministicInSeed) {
  const ModelConfig c = small_config();
  const auto a = init_params(c, 5), b = init_params(c, 5), other = init_params(c, 6);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), other.fingerprint());
  const auto na = a.named(), nb = b.named();
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_EQ(na[i].name, nb[i].name);
    EXPECT_TRUE(std::equal(na[i].tensor.values().begin(), na[i].tensor.values().end(),
                           nb[i].tensor.values().begin()));
  }
}

TEST(Params, InvalidWidthsRejected) {
  ModelConfig c = small_config();
  c.slot_dim = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = small_config();
  c.hidden = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Heads, ZeroInitGivesZeroAndUniform) {
  for (bool continuous : {false, true}) {
    const ModelConfig c = small_config(continuous);
    const auto p = init_params(c, 3);
    const auto out = predict_heads(p, slots::SlotSet(3, 4));
    EXPECT_EQ(out.value, 0.0);
    EXPECT_EQ(out.reward, 0.0);
    if (continuous) {
      for (double m : out.mean) EXPECT_EQ(m, 0.0);
    } else {
      for (double l : out.logits) EXPECT_EQ(l, out.logits[0]);
    }
    const auto random = predict_heads(p, to_slot_set(random_slots(1, 3, 4, 2)));
    EXPECT_EQ(random.value, 0.0);
  }
}

TEST(Heads, PermutationInvariant) {
  const auto p = perturbed(small_config(), 4);
  const Tensor s = random_slots(2, 4, 4, 5);
  const auto a = predict_heads(p, s);
  const auto b = predict_heads(p, permute_rows(s, {2, 0, 3, 1}));
  for (std::size_t i = 0; i < a.value.numel(); ++i) {
    EXPECT_NEAR(a.value[i], b.value[i], 1e-6);
    EXPECT_NEAR(a.reward[i], b.reward[i], 1e-6);
  }
  for (std::size_t i = 0; i < a.logits.numel(); ++i) EXPECT_NEAR(a.logits[i], b.logits[i], 1e-6);
}

TEST(Dynamics, PermutationEquivariant) {
  const auto p = perturbed(small_config(), 6);
  const Tensor s = random_slots(2, 4, 4, 7);
  const std::vector<int> sigma{3, 1, 0, 2};
  ActionBatch acts;
  acts.indices = {1, 4};
  const Tensor a = permute_rows(dynamics_step(p, s, acts), sigma);
  const Tensor b = dynamics_step(p, permute_rows(s, sigma), acts);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
}

TEST(Dynamics, SingleSlotSkipsEdges) {
  ModelConfig c = small_config();
  c.residual_dynamics = false;
  const auto p = perturbed(c, 8);
  const Tensor s = random_slots(1, 1, 4, 9);
  ActionBatch acts;
  acts.indices = {2};
  GnnStats stats;
  const Tensor next = dynamics_step(p, s, acts, &stats);
  EXPECT_EQ(stats.edge_rows, 0u);
  // node_T(s, embed(a), 0)
  const Tensor emb = ops::slice(p.action_embedding, 0, 2, 1);
  const Tensor in = ops::concat({ops::reshape(s, {1, 4}), emb, Tensor::zeros({1, 6})}, 1);
  const Tensor expect = forward(p.node_dynamics, in);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(next[i], expect[i]);
}

TEST(Dynamics, EdgeCountIsQuadratic) {
  const auto p = init_params(small_config(), 10);
  for (std::size_t k : {1u, 2u, 3u, 5u}) {
    GnnStats stats;
    ActionBatch acts;
    acts.indices = {0, 0};
    dynamics_step(p, random_slots(2, k, 4, 11), acts, &stats);
    EXPECT_EQ(stats.edge_rows, 2 * k * (k - 1));
    GnnStats head_stats;
    predict_heads(p, random_slots(2, k, 4, 11), &head_stats);
    EXPECT_EQ(head_stats.edge_rows, 3 * 2 * k * (k - 1));
  }
}

TEST(Dynamics, NonFiniteRaisesNumericFault) {
  const auto p = init_params(small_config(), 12);
  Tensor s = random_slots(1, 2, 4, 13);
  s.mutable_values()[0] = std::numeric_limits<double>::quiet_NaN();
  ActionBatch acts;
  acts.indices = {0};
  EXPECT_THROW(dynamics_step(p, s, acts), NumericFault);
  EXPECT_THROW(predict_heads(p, s), NumericFault);
}

TEST(Dynamics, ActionErrors) {
  const auto p = init_params(small_config(), 14);
  ActionBatch acts;
  acts.indices = {7};
  EXPECT_THROW(dynamics_step(p, random_slots(1, 2, 4, 1), acts), std::invalid_argument);
  acts.indices = {0, 1};
  EXPECT_THROW(dynamics_step(p, random_slots(1, 2, 4, 1), acts), ShapeError);
}

TEST(Gradients, DynamicsMse) {
  for (bool continuous : {false, true}) {
    const auto p = perturbed(small_config(continuous), 15);
    const Tensor s = random_slots(2, 2, 4, 16), target = random_slots(2, 2, 4, 17);
    ActionBatch acts;
    if (continuous) {
      acts.vectors = {0.3, -0.2, -0.9, 0.5};
    } else {
      acts.indices = {1, 3};
    }
    const auto loss = [&] {
      return ops::mean_all(ops::square(ops::sub(dynamics_step(p, s, acts), target)));
    };
    EXPECT_LT(param_grad_error(p, loss), 1e-4) << (continuous ? "continuous" : "discrete");
  }
}

TEST(Gradients, AllHeadsJointly) {
  for (bool continuous : {false, true}) {
    const auto p = perturbed(small_config(continuous), 18);
    const Tensor s = random_slots(2, 3, 4, 19);
    const auto loss = [&] {
      const auto h = predict_heads(p, s);
      Tensor total = ops::add(ops::sum_all(ops::square(h.value)), ops::sum_all(ops::tanh(h.reward)));
      if (continuous) {
        total = ops::add(total, ops::sum_all(ops::mul(h.mean, h.log_std)));
      } else {
        total = ops::add(total, ops::sum_all(ops::scale(ops::log_softmax(h.logits, 1), -0.3)));
      }
      return total;
    };
    EXPECT_LT(param_grad_error(p, loss), 1e-4);
  }
}

TEST(Gradients, ThreeStepUnroll) {
  const auto p = perturbed(small_config(), 20);
  const Tensor s = random_slots(1, 3, 4, 21);
  const auto loss = [&] {
    Tensor cur = s;
    Tensor total = Tensor::scalar(0.0);
    for (int step = 0; step < 3; ++step) {
      ActionBatch acts;
      acts.indices = {step};
      cur = dynamics_step(p, cur, acts);
      total = ops::add(total, ops::sum_all(ops::square(predict_heads(p, cur).value)));
    }
    return ops::add(total, ops::mean_all(ops::square(cur)));
  };
  EXPECT_LT(param_grad_error(p, loss), 1e-4);
}

TEST(Gaussian, DensityAtMean) {
  GaussianPolicy g{{0.2, -0.4, 0.1}, {0.0, 0.0, 0.0}, 1.0};
  const std::vector<double> at_mean = g.mean;
  EXPECT_NEAR(gaussian_log_density(g, at_mean), -1.5 * std::log(2 * std::numbers::pi), 1e-12);
}

TEST(Gaussian, OutOfBoxQueriesAreClampedAndCounted) {
  GaussianPolicy g{{0.0, 0.0}, {0.0, 0.0}, 1.0};
  const std::size_t before = clamped_density_queries();
  const std::vector<double> outside{3.0, 0.0}, edge{1.0, 0.0};
  EXPECT_DOUBLE_EQ(gaussian_log_density(g, outside), gaussian_log_density(g, edge));
  EXPECT_EQ(clamped_density_queries(), before + 1);
}

TEST(Gaussian, SampleMean) {
  GaussianPolicy g{{0.3, -0.25}, {std::log(0.2), std::log(0.1)}, 1.0};
  std::mt19937_64 rng(22);
  const auto draws = gaussian_sample(g, 100000, rng);
  double m0 = 0, m1 = 0;
  for (const auto& d : draws) {
    EXPECT_LE(std::abs(d[0]), 1.0);
    m0 += d[0];
    m1 += d[1];
  }
  EXPECT_NEAR(m0 / draws.size(), 0.3, 0.01);
  EXPECT_NEAR(m1 / draws.size(), -0.25, 0.01);
}

TEST(Gaussian, DensityGradient) {
  Tensor mean({2, 2}, {0.1, -0.3, 0.4, 0.2}, true);
  Tensor log_std({2, 2}, {-0.5, 0.2, 0.0, -1.0}, true);
  const Tensor actions({6, 2}, {0.3, 0.1, -0.2, -0.5, 0.0, 0.9, 0.5, 0.5, 0.1, 0.0, -0.7, 0.3});
  const auto loss = [&] { return ops::sum_all(gaussian_log_density(mean, log_std, actions, 3)); };
  {
    Tape tape;
    TapeScope scope(tape);
    tape.backward(loss());
  }
  const double h = 1e-5;
  for (Tensor* t : {&mean, &log_std}) {
    auto vals = t->mutable_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      vals[i] = keep + h;
      const double up = loss().item();
      vals[i] = keep - h;
      const double down = loss().item();
      vals[i] = keep;
      const double num = (up - down) / (2 * h);
      EXPECT_NEAR(t->grad()[i], num, 1e-5 * std::max(1.0, std::abs(num)));
    }
  }
  // agrees with the scalar form
  GaussianPolicy g{{0.1, -0.3}, {-0.5, 0.2}, 1.0};
  const std::vector<double> a{0.3, 0.1};
  EXPECT_NEAR(gaussian_log_density(mean, log_std, actions, 3)[0], gaussian_log_density(g, a), 1e-12);
}

TEST(Heads, LogStdClamped) {
  auto p = init_params(small_config(true), 23);
  // Push the log-std half of the policy readout bias far out of range.
  auto bias = p.readout_policy.b2.mutable_values();
  bias[2] = 50.0;
  bias[3] = -50.0;
  const auto out = predict_heads(p, to_slot_set(random_slots(1, 3, 4, 24)));
  EXPECT_EQ(out.log_std[0], kLogStdMax);
  EXPECT_EQ(out.log_std[1], kLogStdMin);
}

}  // namespace
