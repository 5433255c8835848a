#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slotzero/env/tabular.hpp"
#include "slotzero/model/params.hpp"
#include "slotzero/planner/value.hpp"
#include "slotzero/tensor/ops.hpp"
#include "slotzero/trainer/loss.hpp"
#include "slotzero/verify/grad_sweep.hpp"
#include "slotzero/verify/permutation_stress.hpp"
#include "slotzero/verify/suite.hpp"
#include "slotzero/verify/sve_bruteforce.hpp"
#include "slotzero/verify/value_iteration.hpp"

namespace {

using namespace sz;
using namespace sz::verify;

env::TabularMdp single_state(double reward, bool terminal) {
  env::TabularMdp m;
  m.num_states = 1;
  m.num_actions = 1;
  m.states.resize(1);
  m.next = {0};
  m.reward = {reward};
  m.terminal = {static_cast<char>(terminal)};
  return m;
}

TEST(ValueIteration, SelfLoopGeometricSeries) {
  const auto sol = value_iteration(single_state(1.0, false), 0.5);
  EXPECT_NEAR(sol.value[0], 2.0, 1e-11);
  EXPECT_LT(sol.residual, 1e-12);
}

TEST(ValueIteration, TerminalOnlyIsZero) {
  auto m = single_state(0.0, true);
  const auto sol = value_iteration(m, 0.9);
  EXPECT_EQ(sol.value[0], 0.0);
}

TEST(ValueIteration, RejectsUndiscounted) {
  EXPECT_THROW(value_iteration(single_state(1.0, false), 1.0), std::invalid_argument);
  EXPECT_THROW(value_iteration(single_state(1.0, false), -0.1), std::invalid_argument);
}

TEST(ValueIteration, ShortestPathClosedForm) {
  env::EnvConfig c;
  c.grid_size = 3;
  c.num_objects = 2;
  const auto mdp = env::enumerate_tabular(c);
  const double gamma = 0.9;
  const auto sol = value_iteration(mdp, gamma);
  int checked = 0;
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.terminal[s]) {
      EXPECT_EQ(sol.value[s], 0.0);
      continue;
    }
    const auto& o = mdp.states[s].objects;
    const int d = static_cast<int>(std::abs(o[0].position.x - o[1].position.x) +
                                   std::abs(o[0].position.y - o[1].position.y));
    EXPECT_NEAR(sol.value[s], std::pow(gamma, d - 1), 1e-10);
    ++checked;
  }
  EXPECT_EQ(checked, 72);
  for (std::size_t i = 1; i < sol.residual_history.size(); ++i) {
    EXPECT_LE(sol.residual_history[i], sol.residual_history[i - 1]);
  }
  // Bellman fixed point
  for (int s = 0; s < mdp.num_states; ++s) {
    double best = -1e9;
    for (int a = 0; a < mdp.num_actions; ++a) {
      best = std::max(best, mdp.reward_of(s, a) + gamma * sol.value[mdp.successor(s, a)]);
    }
    EXPECT_NEAR(best, sol.value[s], 1e-10);
  }
}

TEST(Sve, ZeroRewardTrajectories) {
  std::vector<planner::TrajectoryRecord> log(3);
  log[0].depth = 2;
  log[0].rewards = {0.0, 0.0};
  log[0].leaf_value = 1.0;
  log[1].depth = 1;
  log[1].rewards = {0.0};
  log[1].leaf_value = 2.0;
  log[2].depth = 3;
  log[2].rewards = {0.0, 0.0, 0.0};
  log[2].leaf_value = -1.0;
  const double g = 0.8;
  EXPECT_NEAR(sve_bruteforce(log, g), (g * g * 1.0 + g * 2.0 - g * g * g) / 3.0, 1e-15);
}

TEST(Sve, DuplicatesDoNotChangeMean) {
  planner::TrajectoryRecord t;
  t.depth = 2;
  t.rewards = {0.3, -0.1};
  t.leaf_value = 0.7;
  const std::vector<planner::TrajectoryRecord> one{t}, two{t, t};
  EXPECT_DOUBLE_EQ(sve_bruteforce(one, 0.9), sve_bruteforce(two, 0.9));
  EXPECT_DOUBLE_EQ(sve_bruteforce(one, 0.9), planner::search_value_estimate(one, 0.9));
}

TEST(Sve, AgreesWithPlanner) { EXPECT_LE(sve_max_disagreement(10000, 21), 1e-12); }

TEST(GradSweep, LinearModelExact) {
  const Tensor w = Tensor::scalar(1.7, true);
  const double x = -0.6;
  const std::vector<model::NamedTensor> params{{"w", w}};
  const auto report = grad_sweep(params, [&] { return ops::square(ops::scale(w, x)); }, 1e-10);
  EXPECT_TRUE(report.passed());
  EXPECT_NEAR(w.grad()[0], 2 * 1.7 * x * x, 1e-15);
  EXPECT_LT(report.max_rel_error, 1e-10);
}

TEST(GradSweep, FullLossDiscrete) {
  const auto r = sweep_training_loss(FixtureSpec{}, 22, 1e-4);
  EXPECT_TRUE(r.passed()) << r.worst << " " << r.max_rel_error;
  EXPECT_EQ(r.tensors.size(), model::init_params(model::ModelConfig{}, 0).named().size());
}

TEST(GradSweep, FullLossContinuousAndCosine) {
  FixtureSpec spec;
  spec.continuous = true;
  const auto r = sweep_training_loss(spec, 23, 1e-4);
  EXPECT_TRUE(r.passed()) << r.worst << " " << r.max_rel_error;
  FixtureSpec cos;
  cos.consistency = trainer::ConsistencyLoss::cosine;
  const auto c = sweep_training_loss(cos, 24, 1e-4);
  EXPECT_TRUE(c.passed()) << c.worst << " " << c.max_rel_error;
}

TEST(GradSweep, CorruptedAdjointIsNamed) {
  auto fx = make_loss_fixture(FixtureSpec{}, 25);
  const auto named = fx.params.named();
  const std::string victim = "node_value.w0";
  Tensor target;
  for (const auto& nt : named) {
    if (nt.name == victim) target = nt.tensor;
  }
  ASSERT_TRUE(target.defined());
  const auto loss = [&] { return trainer::compute_loss(fx.params, fx.targets, fx.config).total; };
  const auto report = grad_sweep(named, loss, 1e-4, 1e-5, [&] { target.mutable_grad()[3] += 0.25; });
  EXPECT_EQ(report.failing, (std::vector<std::string>{victim}));
  EXPECT_EQ(report.worst, victim);
}

TEST(Permutation, IdentityHasZeroDeviation) {
  model::ModelConfig c;
  c.slot_dim = 6;
  c.hidden = 8;
  const auto p = model::init_params(c, 26);
  const auto r = permutation_stress(p, 4, 50, 27, 1e-6, true);
  EXPECT_EQ(r.worst(), 0.0);
}

TEST(Permutation, SingleSlotPasses) {
  const auto p = model::init_params(model::ModelConfig{}, 28);
  EXPECT_TRUE(permutation_stress(p, 1, 20, 29).passed());
}

TEST(Permutation, RandomTrialsFourSlots) {
  for (bool continuous : {false, true}) {
    model::ModelConfig c;
    c.action.continuous = continuous;
    const auto p = model::init_params(c, 30);
    const auto r = permutation_stress(p, 4, 100, 31);
    EXPECT_TRUE(r.passed()) << r.worst();
    EXPECT_EQ(r.trials, 100);
  }
}

TEST(Suite, FastModePasses) {
  const auto report = run_suite(true);
  EXPECT_TRUE(report.passed()) << report.to_text();
  EXPECT_GE(report.checks.size(), 7u);
}

}  // namespace
