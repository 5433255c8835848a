#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "slotzero/model/gnn.hpp"
#include "slotzero/tensor/tape.hpp"
#include "slotzero/trainer/loss.hpp"
#include "slotzero/trainer/optimizer.hpp"
#include "slotzero/trainer/replay.hpp"
#include "slotzero/trainer/run.hpp"
#include "slotzero/trainer/step.hpp"
#include "slotzero/trainer/targets.hpp"

namespace {

using namespace sz;
using namespace sz::trainer;

constexpr std::size_t kSlots = 2;
constexpr std::size_t kDim = 4;

model::ModelConfig tiny_model() {
  model::ModelConfig c;
  c.slot_dim = kDim;
  c.hidden = 8;
  c.action_embed = 3;
  return c;
}

slots::SlotSet random_slots(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(kSlots * kDim);
  for (auto& x : v) x = n(rng);
  return slots::SlotSet(kSlots, kDim, v);
}

std::vector<TransitionRecord> make_episode(std::uint64_t id, int length, bool contact,
                                           std::mt19937_64& rng) {
  std::vector<TransitionRecord> ep;
  slots::SlotSet cur = random_slots(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < length; ++t) {
    TransitionRecord r;
    r.slots = cur;
    r.next_slots = random_slots(rng);
    cur = r.next_slots;
    r.action = static_cast<int>(rng() % 5);
    r.policy.assign(5, 0.0);
    double total = 0.0;
    for (auto& p : r.policy) total += (p = u(rng) + 0.01);
    for (auto& p : r.policy) p /= total;
    r.search_value = u(rng);
    r.episode = id;
    r.position = t;
    const bool last = t + 1 == length;
    r.done = last && contact;
    r.truncated = last && !contact;
    r.reward = r.done ? 1.0 : 0.0;
    ep.push_back(std::move(r));
  }
  return ep;
}

ReplayBuffer make_buffer(std::int64_t capacity, int episodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ReplayBuffer buffer(capacity);
  for (int e = 0; e < episodes; ++e) {
    buffer.insert_episode(make_episode(static_cast<std::uint64_t>(e), 3 + static_cast<int>(rng() % 6),
                                       e % 2 == 0, rng));
  }
  return buffer;
}

TrainerConfig small_trainer() {
  TrainerConfig c;
  c.unroll_steps = 3;
  c.td_steps = 3;
  c.batch_size = 8;
  c.buffer_capacity = 1000;
  c.t1 = 10;
  c.t2 = 100;
  return c;
}

std::vector<std::vector<double>> grads_of(const model::ModelParams& p) {
  std::vector<std::vector<double>> out;
  for (const auto& nt : p.named()) {
    if (nt.tensor.has_grad()) {
      out.emplace_back(nt.tensor.grad().begin(), nt.tensor.grad().end());
    } else {
      out.emplace_back(nt.tensor.numel(), 0.0);
    }
  }
  return out;
}

std::vector<std::vector<double>> loss_grads(const model::ModelParams& p, const TrainTargets& t,
                                            const TrainerConfig& c) {
  model::zero_grads(p);
  Tape tape;
  TapeScope scope(tape);
  tape.backward(compute_loss(p, t, c).total);
  return grads_of(p);
}

TEST(Targets, TdSpotCheck) {
  const std::vector<double> u{1.0, 0.0};
  EXPECT_NEAR(td_return(u, 0.5, 0.9), 1.405, 1e-15);
  EXPECT_DOUBLE_EQ(td_return(u, std::nullopt, 0.9), 1.0);
}

TEST(Targets, BranchPredicate) {
  TrainerConfig c;
  c.t1 = 100;
  c.t2 = 30;
  c.buffer_capacity = 50;
  EXPECT_TRUE(use_td_branch(0, 0, c));
  EXPECT_TRUE(use_td_branch(0, 49, c));
  EXPECT_FALSE(use_td_branch(100, 20, c));  // fresh: age <= 50 - 30
  EXPECT_TRUE(use_td_branch(100, 21, c));   // stale
  EXPECT_FALSE(use_td_branch(5000, 0, c));
}

TEST(Targets, SearchBranchReturnsStoredValue) {
  auto buffer = make_buffer(1000, 6, 1);
  TrainerConfig c = small_trainer();
  const auto v = value_target(buffer, buffer.size() - 1, 50, c, [](const slots::SlotSet&) { return 9.0; });
  EXPECT_EQ(v.decision.branch, ValueBranch::search);
  EXPECT_EQ(v.value, buffer.at(buffer.size() - 1).search_value);
}

TEST(Targets, TdBootstrapAndTruncation) {
  std::mt19937_64 rng(2);
  ReplayBuffer buffer(100);
  auto ep = make_episode(0, 6, true, rng);
  ep[1].reward = 0.5;
  buffer.insert_episode(ep);
  TrainerConfig c = small_trainer();
  c.gamma = 0.9;
  c.td_steps = 2;
  const slots::SlotSet* asked = nullptr;
  const auto boot = value_target(buffer, 0, 0, c, [&](const slots::SlotSet& s) {
    asked = &s;
    return 0.5;
  });
  EXPECT_EQ(boot.decision.branch, ValueBranch::td);
  EXPECT_NEAR(boot.value, 0.0 + 0.9 * 0.5 + 0.81 * 0.5, 1e-15);
  ASSERT_NE(asked, nullptr);
  EXPECT_EQ(*asked, buffer.at(1).next_slots);
  // window reaches the contact step: no bootstrap
  const auto end = value_target(buffer, 4, 0, c, [](const slots::SlotSet&) { return 100.0; });
  EXPECT_NEAR(end.value, 0.0 + 0.9 * 1.0, 1e-15);
}

TEST(Targets, EpisodeEndMasking) {
  std::mt19937_64 rng(3);
  ReplayBuffer buffer(100);
  buffer.insert_episode(make_episode(0, 4, true, rng));
  buffer.insert_episode(make_episode(1, 4, true, rng));
  const auto p = model::init_params(tiny_model(), 1);
  TrainerConfig c = small_trainer();
  c.absorbing_terminal = false;
  const std::vector<std::size_t> idx{3};  // last record of episode 0
  auto t = build_targets(buffer, idx, p, 0, c);
  EXPECT_EQ(t.mask, (std::vector<char>{1, 0, 0}));
  EXPECT_EQ(t.transition_mask, (std::vector<char>{1, 0, 0}));
  EXPECT_EQ(t.value_mask, (std::vector<char>{1, 0, 0}));
  c.absorbing_terminal = true;
  t = build_targets(buffer, idx, p, 0, c);
  EXPECT_EQ(t.mask, (std::vector<char>{1, 0, 0}));
  EXPECT_EQ(t.transition_mask, (std::vector<char>{1, 1, 1}));
  EXPECT_EQ(t.value_mask, (std::vector<char>{1, 1, 1}));
  // absorbing rows lead to the empty slot set with nothing to earn
  for (std::size_t row : {1, 2}) {
    EXPECT_EQ(t.value[row], 0.0);
    EXPECT_EQ(t.reward[row], 0.0);
    for (std::size_t i = 0; i < kSlots * kDim; ++i) EXPECT_EQ(t.next_slots[row * kSlots * kDim + i], 0.0);
  }
}

TEST(Targets, TruncatedEpisodeGetsNoAbsorbingValue) {
  std::mt19937_64 rng(4);
  ReplayBuffer buffer(100);
  buffer.insert_episode(make_episode(0, 4, false, rng));
  const auto p = model::init_params(tiny_model(), 1);
  const std::vector<std::size_t> idx{3};
  const auto t = build_targets(buffer, idx, p, 0, small_trainer());
  EXPECT_EQ(t.transition_mask, (std::vector<char>{1, 0, 0}));
  EXPECT_EQ(t.value_mask, (std::vector<char>{1, 0, 0}));
}

TEST(Targets, DecisionsMatchPredicate) {
  auto buffer = make_buffer(60, 30, 5);
  TrainerConfig c = small_trainer();
  c.buffer_capacity = 60;
  c.t2 = 20;
  const auto p = model::init_params(tiny_model(), 2);
  std::mt19937_64 rng(6);
  for (std::int64_t it : {0, 9, 10, 500}) {
    const auto idx = buffer.sample(16, rng);
    const auto t = build_targets(buffer, idx, p, it, c);
    for (const auto& d : t.decisions) {
      const bool td = d.iteration < c.t1 || d.age > c.buffer_capacity - c.t2;
      EXPECT_EQ(d.branch == ValueBranch::td, td);
    }
  }
}

TEST(Loss, AnnihilatedTermsGiveZero) {
  auto buffer = make_buffer(1000, 6, 7);
  // zero rewards everywhere: the zero-initialised reward readout is then perfect
  std::deque<TransitionRecord> recs = buffer.records();
  for (auto& r : recs) r.reward = 0.0;
  buffer = ReplayBuffer::restore(1000, buffer.total_inserted(), recs);
  TrainerConfig c = small_trainer();
  c.lambda_policy = c.lambda_value = c.lambda_consistency = 0.0;
  const auto p = model::init_params(tiny_model(), 3);
  const std::vector<std::size_t> idx{0, 2, 5};
  const auto loss = compute_loss(p, build_targets(buffer, idx, p, 0, c), c);
  EXPECT_EQ(loss.total.item(), 0.0);
  EXPECT_GT(loss.policy, 0.0);
}

TEST(Loss, MaskedGarbageHasNoEffect) {
  std::mt19937_64 rng(8);
  ReplayBuffer buffer(100);
  buffer.insert_episode(make_episode(0, 3, true, rng));
  buffer.insert_episode(make_episode(1, 5, false, rng));
  auto p = model::init_params(tiny_model(), 4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& nt : p.named()) for (auto& v : nt.tensor.mutable_values()) v += u(rng);
  const TrainerConfig c = small_trainer();
  const std::vector<std::size_t> idx{1, 2, 6};
  const auto clean = build_targets(buffer, idx, p, 0, c);
  auto dirty = clean;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int poisoned = 0;
  for (std::size_t row = 0; row < dirty.mask.size(); ++row) {
    if (!dirty.mask[row]) {
      for (std::size_t a = 0; a < dirty.width; ++a) dirty.policy[row * dirty.width + a] = 1e300;
      ++poisoned;
    }
    if (!dirty.transition_mask[row]) {
      dirty.reward[row] = nan;
      for (std::size_t i = 0; i < kSlots * kDim; ++i) dirty.next_slots[row * kSlots * kDim + i] = nan;
      dirty.actions[row] = 4;
    }
    if (!dirty.value_mask[row]) dirty.value[row] = nan;
  }
  ASSERT_GT(poisoned, 0);
  const auto l1 = compute_loss(p, clean, c), l2 = compute_loss(p, dirty, c);
  EXPECT_EQ(l1.total.item(), l2.total.item());
  EXPECT_EQ(loss_grads(p, clean, c), loss_grads(p, dirty, c));
}

TEST(Loss, CosineConsistencyIsOneMinusCosine) {
  std::mt19937_64 rng(9);
  ReplayBuffer buffer(100);
  auto ep = make_episode(0, 3, true, rng);
  buffer.insert_episode(ep);
  TrainerConfig c = small_trainer();
  c.unroll_steps = 1;
  c.consistency = ConsistencyLoss::cosine;
  const auto p = model::init_params(tiny_model(), 5);
  const std::vector<std::size_t> idx{0};
  const auto loss = compute_loss(p, build_targets(buffer, idx, p, 0, c), c);
  const auto next = model::dynamics_step(p, ep[0].slots, ep[0].action);
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < kSlots * kDim; ++i) {
    const double a = next.values()[i], b = ep[0].next_slots.values()[i];
    dot += a * b;
    na += a * a;
    nb += b * b;
  }
  EXPECT_NEAR(loss.consistency, 1.0 - dot / std::sqrt(na * nb), 1e-9);
}

TEST(Optimizer, ClipToHalf) {
  auto p = model::init_params(tiny_model(), 6);
  auto named = p.named();
  for (const auto& nt : named) nt.tensor.node()->ensure_grad();
  // total norm 5: 3 and 4 in two entries
  named[0].tensor.mutable_grad()[0] = 3.0;
  named[1].tensor.mutable_grad()[0] = 4.0;
  EXPECT_DOUBLE_EQ(clip_grad_norm(p, 0.5), 5.0);
  EXPECT_NEAR(global_grad_norm(p), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(named[0].tensor.grad()[0], 0.3);
  EXPECT_DOUBLE_EQ(clip_grad_norm(p, 0.5), global_grad_norm(p));
}

TEST(Optimizer, ZeroGradientLeavesParams) {
  auto p = model::init_params(tiny_model(), 7);
  const auto before = p.clone();
  model::zero_grads(p);
  for (const auto& nt : p.named()) nt.tensor.node()->ensure_grad();
  auto adam = AdamState::zeros_like(p);
  TrainerConfig c;
  adam_step(p, adam, c);
  EXPECT_EQ(p.fingerprint(), before.fingerprint());
  EXPECT_EQ(adam.steps, 1);
}

TEST(Optimizer, AdamFirstStepMovesBySignTimesLr) {
  auto p = model::init_params(tiny_model(), 8);
  const double w = p.named()[0].tensor[0];
  for (const auto& nt : p.named()) nt.tensor.node()->ensure_grad();
  p.named()[0].tensor.mutable_grad()[0] = -2.0;
  auto adam = AdamState::zeros_like(p);
  TrainerConfig c;
  c.learning_rate = 0.01;
  adam_step(p, adam, c);
  EXPECT_NEAR(p.named()[0].tensor[0], w + 0.01, 1e-9);
}

TEST(Step, OverfitsFixedBatch) {
  auto buffer = make_buffer(1000, 10, 10);
  auto p = model::init_params(tiny_model(), 9);
  auto adam = AdamState::zeros_like(p);
  TrainerConfig c = small_trainer();
  c.learning_rate = 1e-3;
  std::mt19937_64 rng(11);
  const auto idx = buffer.sample(8, rng);
  const auto targets = build_targets(buffer, idx, p, 0, c);
  double previous = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 50; ++s) {
    const auto r = train_on_targets(targets, p, adam, c);
    ASSERT_TRUE(r.applied);
    EXPECT_LT(r.loss_total, previous) << "step " << s;
    previous = r.loss_total;
  }
}

TEST(Step, NonFiniteLossIsSkipped) {
  auto buffer = make_buffer(1000, 4, 12);
  auto p = model::init_params(tiny_model(), 10);
  auto adam = AdamState::zeros_like(p);
  const auto before = p.fingerprint();
  TrainerConfig c = small_trainer();
  const std::vector<std::size_t> idx{0, 1};
  auto targets = build_targets(buffer, idx, p, 0, c);
  targets.reward[0] = std::numeric_limits<double>::infinity();
  const auto r = train_on_targets(targets, p, adam, c);
  EXPECT_TRUE(r.fault);
  EXPECT_FALSE(r.applied);
  EXPECT_EQ(p.fingerprint(), before);
  EXPECT_EQ(adam.steps, 0);
}

TEST(Replay, FifoEviction) {
  std::mt19937_64 rng(13);
  ReplayBuffer buffer(10);
  for (int e = 0; e < 13; ++e) buffer.insert_episode(make_episode(static_cast<std::uint64_t>(e), 1, true, rng));
  EXPECT_EQ(buffer.size(), 10u);
  EXPECT_EQ(buffer.total_inserted(), 13);
  EXPECT_EQ(buffer.at(0).episode, 3u);
  EXPECT_EQ(buffer.insertion_index(0), 3);
  EXPECT_EQ(buffer.age(9), 0);
  EXPECT_EQ(buffer.age(0), 9);
  for (const auto& r : buffer.records()) EXPECT_GE(r.episode, 3u);
}

TEST(Replay, PositionsMustIncrease) {
  std::mt19937_64 rng(14);
  ReplayBuffer buffer(10);
  auto ep = make_episode(0, 3, true, rng);
  ep[2].position = 1;
  EXPECT_THROW(buffer.insert_episode(ep), std::invalid_argument);
  auto bad = make_episode(1, 1, true, rng);
  bad[0].reward = std::nan("");
  EXPECT_THROW(buffer.insert(bad[0]), std::invalid_argument);
}

RunConfig quick_run(std::int64_t steps) {
  RunConfig rc;
  rc.env.grid_size = 4;
  rc.model.slot_dim = 8;
  rc.model.hidden = 8;
  rc.planner.simulations = 8;
  rc.planner.num_candidates = 4;
  rc.planner.depth_cap = 4;
  rc.trainer.unroll_steps = 2;
  rc.trainer.td_steps = 3;
  rc.trainer.batch_size = 4;
  rc.trainer.min_replay = 20;
  rc.trainer.train_ratio = 0.5;
  rc.trainer.total_env_steps = steps;
  rc.trainer.eval_interval = 40;
  rc.trainer.eval_episodes = 3;
  rc.trainer.t1 = 10;
  rc.trainer.buffer_capacity = 200;
  rc.trainer.t2 = 50;
  rc.seed = 17;
  return finalize(rc);
}

TEST(Run, ZeroStepsKeepsInitialParams) {
  Trainer t(quick_run(0));
  t.run();
  const auto init = model::init_params(t.config().model, params_seed(17));
  EXPECT_EQ(t.state().params.fingerprint(), init.fingerprint());
  EXPECT_EQ(t.state().iteration, 0);
}

TEST(Run, SameSeedSameMetrics) {
  Trainer a(quick_run(80)), b(quick_run(80));
  std::vector<BranchDecision> decisions;
  TrainingHooks hooks;
  hooks.train_step = [&](const TrainStepResult& r) {
    decisions.insert(decisions.end(), r.decisions.begin(), r.decisions.end());
  };
  a.run(hooks);
  b.run();
  EXPECT_GT(a.state().iteration, 0);
  EXPECT_EQ(a.state().metrics, b.state().metrics);
  EXPECT_EQ(a.state().params.fingerprint(), b.state().params.fingerprint());
  const auto& c = a.config().trainer;
  for (const auto& d : decisions) {
    EXPECT_EQ(d.branch == ValueBranch::td, d.iteration < c.t1 || d.age > c.buffer_capacity - c.t2);
  }
}

TEST(Run, ConfigValidation) {
  RunConfig rc = quick_run(10);
  rc.trainer.gamma = 1.0;
  EXPECT_THROW(finalize(rc), std::invalid_argument);
  rc = quick_run(10);
  rc.trainer.unroll_steps = 0;
  EXPECT_THROW(finalize(rc), std::invalid_argument);
}

}  // namespace
