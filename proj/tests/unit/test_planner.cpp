#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "slotzero/planner/search.hpp"
#include "slotzero/util/seed.hpp"
#include "slotzero/verify/suite.hpp"
#include "slotzero/verify/sve_bruteforce.hpp"

namespace {

using namespace sz;
using namespace sz::planner;

// Root with fixed logits whose actions lead to leaves with constant reward q[a] and value 0.
struct ConstantQModel {
  using Latent = int;
  std::vector<double> q;
  std::vector<double> logits;
  NodePrediction evaluate(const Latent& s) const {
    NodePrediction p;
    p.reward = s > 0 ? q[static_cast<std::size_t>(s - 1)] : 0.0;
    p.value = 0.0;
    p.logits = logits;
    return p;
  }
  Latent transition(const Latent&, const ModelAction& a) const { return std::get<int>(a) + 1; }
};

// Every state is a hash; rewards, values and logits are pseudo-random functions of it.
struct HashModel {
  using Latent = std::uint64_t;
  int actions = 5;
  bool continuous = false;
  NodePrediction evaluate(const Latent& s) const {
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    NodePrediction p;
    p.reward = u(rng);
    p.value = u(rng);
    if (continuous) {
      p.gaussian.mean = {0.5 * u(rng), 0.5 * u(rng)};
      p.gaussian.log_std = {-1.0, -1.0};
    } else {
      for (int a = 0; a < actions; ++a) p.logits.push_back(2.0 * u(rng));
    }
    return p;
  }
  Latent transition(const Latent& s, const ModelAction& a) const {
    if (const int* i = std::get_if<int>(&a)) return mix_seed(s ^ static_cast<std::uint64_t>(*i + 1));
    const auto& v = std::get<std::vector<double>>(a);
    return mix_seed(s ^ static_cast<std::uint64_t>(std::llround(v[0] * 1e6) * 31 + std::llround(v[1] * 1e6)));
  }
};

// Faults whenever asked to evaluate a state deeper than `fault_depth`.
struct FaultingModel {
  using Latent = int;
  int fault_depth = 2;
  NodePrediction evaluate(const Latent& depth) const {
    if (depth > fault_depth) throw model::NumericFault("synthetic fault");
    NodePrediction p;
    p.logits = {0.0, 0.0};
    return p;
  }
  Latent transition(const Latent& depth, const ModelAction&) const { return depth + 1; }
};

PlannerConfig discrete_config(int actions, int m, int n) {
  PlannerConfig c;
  c.num_actions = actions;
  c.num_candidates = m;
  c.simulations = n;
  return c;
}

TEST(Candidates, NoNoiseFollowsLogits) {
  std::mt19937_64 rng(1);
  const std::vector<double> logits{0.1, 2.0, -1.0, 0.7};
  const auto set = gumbel_root_candidates(logits, 3, rng, false);
  EXPECT_EQ(set.ids, (std::vector<int>{1, 3, 0}));
}

TEST(Candidates, DeterministicInSeed) {
  const std::vector<double> logits{0.1, 0.2, 0.3, 0.4, 0.5};
  std::mt19937_64 a(7), b(7);
  const auto x = gumbel_root_candidates(logits, 3, a), y = gumbel_root_candidates(logits, 3, b);
  EXPECT_EQ(x.ids, y.ids);
  EXPECT_EQ(x.gumbel, y.gumbel);
}

TEST(Candidates, Errors) {
  std::mt19937_64 rng(2);
  const std::vector<double> bad{0.0, std::nan("")};
  EXPECT_THROW(gumbel_root_candidates(bad, 1, rng), std::invalid_argument);
  model::GaussianPolicy g{{0.0, 0.0}, {0.0, 0.0}, 1.0};
  EXPECT_THROW(gumbel_root_candidates(g, 1, 0.75, rng), std::invalid_argument);
  const auto set = gumbel_root_candidates(g, 6, 0.75, rng);
  EXPECT_EQ(set.ids.size(), 6u);
  for (const auto& a : set.actions) {
    for (double x : std::get<std::vector<double>>(a)) EXPECT_LE(std::abs(x), 1.0);
  }
}

TEST(Candidates, GumbelMaxIdentity) {
  const int draws = 50000;
  const double p = std::exp(1.0) / (std::exp(1.0) + 1.0);
  const double freq = verify::gumbel_first_action_frequency(draws, 3);
  EXPECT_NEAR(freq, p, 0.01);
  EXPECT_NEAR(freq, p, 3.0 * std::sqrt(p * (1 - p) / draws));
}

TEST(Candidates, MixtureUsesPriorAtRateOneMinusBeta) {
  // A narrow policy far from the box corners: uniform-prior draws are the ones that land outside.
  model::GaussianPolicy g{{0.0, 0.0}, {-6.0, -6.0}, 1.0};
  std::mt19937_64 rng(4);
  const auto draws = sample_mixture_actions(g, 20000, 0.75, rng);
  int far = 0;
  for (const auto& a : draws) {
    const auto& v = std::get<std::vector<double>>(a);
    if (std::abs(v[0]) > 0.05 || std::abs(v[1]) > 0.05) ++far;
  }
  // P(uniform draw lands inside the +-0.05 square) = 0.0025
  EXPECT_NEAR(static_cast<double>(far) / draws.size(), 0.25 * 0.9975, 0.01);
}

TEST(Halving, FourCandidatesEightSimulations) {
  const auto plan = plan_halving(4, 8);
  EXPECT_EQ(plan.phases(), 2);
  EXPECT_EQ(allocate_phase(plan.phase_survivors[0], plan.phase_budget[0]), (std::vector<int>{1, 1, 1, 1}));
  EXPECT_EQ(allocate_phase(plan.phase_survivors[1], plan.phase_budget[1]), (std::vector<int>{2, 2}));

  const ConstantQModel model{{0.1, 0.4, 0.3, 0.2}, {0, 0, 0, 0}};
  auto config = discrete_config(4, 4, 8);
  config.depth_cap = 1;
  const auto result = run_search(model, 0, config, 5, false);
  EXPECT_EQ(result.chosen, 1);
  EXPECT_EQ(result.visits[1], 3);
  EXPECT_EQ(std::accumulate(result.visits.begin(), result.visits.end(), 0), 8);
}

TEST(Halving, ScheduleAccounting) {
  for (int m = 1; m <= 16; ++m) {
    for (int n = m; n <= 64; ++n) {
      const auto plan = plan_halving(m, n);
      int expected_phases = 0;
      while ((1 << expected_phases) < m) ++expected_phases;
      EXPECT_EQ(plan.phases(), std::max(1, expected_phases));
      EXPECT_EQ(std::accumulate(plan.phase_budget.begin(), plan.phase_budget.end(), 0), n);
      EXPECT_GE(plan.phase_budget[0], m);
      if (n >= 2 * m * plan.phases()) {
        for (int p = 0; p + 1 < plan.phases(); ++p) EXPECT_EQ(plan.phase_budget[p], n / plan.phases());
      }
      EXPECT_LE(plan.phase_survivors.back(), 2);
    }
  }
  EXPECT_THROW(plan_halving(4, 3), std::invalid_argument);
  EXPECT_EQ(allocate_phase(3, 7), (std::vector<int>{3, 2, 2}));
}

TEST(Halving, SingleCandidateTakesAllVisits) {
  HashModel model;
  auto config = discrete_config(5, 1, 12);
  const auto result = run_search(model, 99, config, 6);
  EXPECT_EQ(result.visits[result.chosen], 12);
  EXPECT_EQ(std::accumulate(result.visits.begin(), result.visits.end(), 0), 12);
}

TEST(Halving, SurvivorIsArgmaxForEveryOrdering) {
  std::vector<double> q{0.1, 0.2, 0.3, 0.4};
  int instances = 0;
  do {
    const int best = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
    for (const auto& logits : {std::vector<double>{0, 0, 0, 0}, std::vector<double>{2, -1, 0.5, 1}}) {
      for (int n : {4, 5, 8, 13, 32}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const ConstantQModel model{q, logits};
          auto config = discrete_config(4, 4, n);
          config.depth_cap = 1;
          const auto result = run_search(model, 0, config, seed);
          ASSERT_EQ(result.chosen, best);
          ++instances;
        }
      }
    }
  } while (std::next_permutation(q.begin(), q.end()));
  EXPECT_EQ(instances, 24 * 2 * 5 * 5);
}

TEST(Halving, MoreSimulationsNeverHurt) {
  // Fraction of seeds whose survivor is the true argmax, for growing budgets.
  const ConstantQModel model{{0.30, 0.32, 0.31, 0.29}, {1.5, -0.5, 0.8, 1.0}};
  double previous = 0.0;
  for (int n : {4, 8, 16, 64}) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto config = discrete_config(4, 4, n);
      config.depth_cap = 1;
      hits += run_search(model, 0, config, seed).chosen == 1 ? 1 : 0;
    }
    const double rate = hits / 200.0;
    EXPECT_GE(rate, previous);
    previous = rate;
  }
}

TEST(Simulate, DepthCapOneIsOneStepLookahead) {
  HashModel model;
  auto config = discrete_config(5, 5, 20);
  config.depth_cap = 1;
  const auto result = run_search(model, 123, config, 7);
  for (const auto& t : result.trajectories) {
    ASSERT_EQ(t.depth, 1);
    const auto child = model.evaluate(model.transition(123, ModelAction(t.candidate)));
    EXPECT_EQ(t.rewards[0], child.reward);
    EXPECT_EQ(t.leaf_value, child.value);
    EXPECT_DOUBLE_EQ(trajectory_return(t, config.gamma), child.reward + config.gamma * child.value);
  }
}

TEST(Simulate, ZeroDiscountKeepsFirstReward) {
  HashModel model;
  auto config = discrete_config(5, 4, 40);
  config.gamma = 0.0;
  const auto result = run_search(model, 77, config, 8);
  for (const auto& t : result.trajectories) EXPECT_EQ(trajectory_return(t, 0.0), t.rewards[0]);
}

TEST(Simulate, TreeInvariants) {
  for (bool continuous : {false, true}) {
    HashModel model;
    model.continuous = continuous;
    PlannerConfig config = discrete_config(5, continuous ? 6 : 4, 50);
    config.continuous = continuous;
    SearchTree<HashModel> tree(model, config, 9);
    tree.init_root(555, true);
    const auto result = sequential_halving(tree);
    EXPECT_EQ(result.trajectories.size(), 50u);
    EXPECT_EQ(tree.root().visits, 51);
    EXPECT_EQ(std::accumulate(result.visits.begin(), result.visits.end(), 0), 50);
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const auto& n = tree.node(static_cast<int>(i));
      int child_visits = 0;
      bool expanded = false;
      for (std::size_t a = 0; a < n.children.size(); ++a) {
        const int c = n.children[a];
        if (c < 0) continue;
        expanded = true;
        child_visits += tree.node(c).visits;
      }
      if (expanded) {
        EXPECT_EQ(n.visits, child_visits + 1);
      }
      EXPECT_LE(n.depth, config.depth_cap);
    }
    for (std::size_t a = 0; a < result.q.size(); ++a) {
      if (result.visits[a] == 0) continue;
      const auto& child = tree.node(tree.root().children[a]);
      EXPECT_DOUBLE_EQ(result.q[a], child.reward + config.gamma * child.value());
    }
  }
}

TEST(Simulate, FaultCarriesTrajectoryContext) {
  FaultingModel model;
  auto config = discrete_config(2, 2, 16);
  config.depth_cap = 8;
  try {
    run_search(model, 0, config, 1);
    FAIL() << "expected a SearchFault";
  } catch (const SearchFault& fault) {
    EXPECT_EQ(fault.context().depth, 2);
    EXPECT_GE(fault.context().candidate, 0);
    EXPECT_NE(std::string(fault.what()).find("synthetic fault"), std::string::npos);
  }
}

TEST(Search, Deterministic) {
  for (bool continuous : {false, true}) {
    HashModel model;
    model.continuous = continuous;
    PlannerConfig config = discrete_config(5, 6, 30);
    config.continuous = continuous;
    const auto a = run_search(model, 31, config, 10), b = run_search(model, 31, config, 10);
    EXPECT_EQ(a.policy, b.policy);
    EXPECT_EQ(a.visits, b.visits);
    EXPECT_EQ(a.q, b.q);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.chosen, b.chosen);
    EXPECT_EQ(a.chosen_action, b.chosen_action);
  }
}

TEST(Search, RejectsBudgetBelowCandidates) {
  HashModel model;
  EXPECT_THROW(run_search(model, 1, discrete_config(5, 5, 3), 1), std::invalid_argument);
}

TEST(TargetPolicy, SumsToOneOnRandomTrees) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10000; ++t) {
    HashModel model;
    model.continuous = t % 5 == 0;
    model.actions = 2 + static_cast<int>(rng() % 6);
    const int m = 2 + static_cast<int>(rng() % 7);
    PlannerConfig config = discrete_config(model.actions, m, m + static_cast<int>(rng() % 20));
    config.continuous = model.continuous;
    config.depth_cap = 1 + static_cast<int>(rng() % 4);
    const auto r = run_search(model, rng(), config, rng());
    const double total = std::accumulate(r.policy.begin(), r.policy.end(), 0.0);
    ASSERT_NEAR(total, 1.0, 1e-9);
    ASSERT_GT(r.policy[r.chosen], 0.0);
  }
}

TEST(TargetPolicy, SingleAction) {
  const std::vector<double> logits{0.3};
  const std::vector<int> visits{4};
  const std::vector<double> q{0.5};
  EXPECT_EQ(make_target_policy(logits, visits, q, 0.0, MinMax{}, PlannerConfig{}),
            (std::vector<double>{1.0}));
}

TEST(TargetPolicy, UniformQGivesPriorSoftmax) {
  const std::vector<double> logits{0.3, -1.0, 2.0, 0.0};
  const std::vector<int> visits{3, 1, 5, 2};
  const std::vector<double> q(4, 0.7);
  MinMax bounds;
  bounds.update(0.2);
  bounds.update(0.9);
  const auto pi = make_target_policy(logits, visits, q, 0.1, bounds, PlannerConfig{});
  const auto prior = softmax(logits);
  for (std::size_t a = 0; a < 4; ++a) EXPECT_NEAR(pi[a], prior[a], 1e-12);
}

TEST(TargetPolicy, UnvisitedGetOnlySmoothingMass) {
  const std::vector<double> logits{0.0, 0.0, 0.0};
  const std::vector<int> visits{2, 0, 1};
  const std::vector<double> q{1.0, 0.0, 0.5};
  MinMax bounds;
  bounds.update(0.0);
  bounds.update(1.0);
  PlannerConfig c;
  const auto pi = make_target_policy(logits, visits, q, 0.5, bounds, c);
  EXPECT_NEAR(pi[1], c.epsilon / 3.0, 1e-15);
  EXPECT_GT(pi[0], pi[2]);
}

TEST(Selection, PrefersHighQThenUnderVisited) {
  PlannerConfig c;
  MinMax bounds;
  bounds.update(0.0);
  bounds.update(1.0);
  const std::vector<double> logits{0.0, 0.0, 0.0};
  EXPECT_EQ(select_interior(logits, std::vector<int>{1, 1, 1}, std::vector<double>{0.2, 0.9, 0.1},
                            0.0, bounds, c), 1);
  // equal Q: the least visited action catches up, ties go to the lower index
  EXPECT_EQ(select_interior(logits, std::vector<int>{3, 1, 1}, std::vector<double>{0.5, 0.5, 0.5},
                            0.5, bounds, c), 1);
}

TEST(Normalization, FloorAndClamp) {
  MinMax m;
  EXPECT_EQ(m.normalize(3.0), 0.0);
  m.update(1.0);
  m.update(1.004);
  EXPECT_NEAR(m.normalize(1.002), 0.2, 1e-12);
  EXPECT_EQ(m.normalize(5.0), 1.0);
  EXPECT_EQ(m.normalize(-5.0), 0.0);
}

TEST(Sve, HandExamples) {
  TrajectoryRecord t;
  t.rewards = {1.0};
  t.leaf_value = 2.0;
  t.depth = 1;
  std::vector<TrajectoryRecord> log{t};
  EXPECT_DOUBLE_EQ(search_value_estimate(log, 0.5), 2.0);
  log.assign(7, t);
  EXPECT_DOUBLE_EQ(search_value_estimate(log, 0.5), 2.0);
  EXPECT_THROW(search_value_estimate(std::vector<TrajectoryRecord>{}, 0.5), std::invalid_argument);
}

TEST(Sve, ReorderingAndBruteForce) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TrajectoryRecord> log(20);
  for (auto& t : log) {
    t.depth = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < t.depth; ++i) t.rewards.push_back(u(rng));
    t.leaf_value = u(rng);
  }
  const double v = search_value_estimate(log, 0.93);
  EXPECT_NEAR(v, verify::sve_bruteforce(log, 0.93), 1e-12);
  std::shuffle(log.begin(), log.end(), rng);
  EXPECT_NEAR(search_value_estimate(log, 0.93), v, 1e-12);
}

TEST(Oracle, TabularModelSmallSample) {
  const auto r = verify::planner_vs_value_iteration(1000, 20, 0.97, 13);
  EXPECT_LE(r.max_value_gap, 0.05);
  EXPECT_EQ(r.optimal_fraction, 1.0);
}

}  // namespace
