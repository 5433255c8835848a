#include "slotzero/verify/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "slotzero/env/tabular.hpp"
#include "slotzero/planner/candidates.hpp"
#include "slotzero/planner/search.hpp"
#include "slotzero/planner/value.hpp"
#include "slotzero/trainer/targets.hpp"
#include "slotzero/util/seed.hpp"
#include "slotzero/verify/grad_sweep.hpp"
#include "slotzero/verify/permutation_stress.hpp"
#include "slotzero/verify/sve_bruteforce.hpp"
#include "slotzero/verify/tabular_model.hpp"
#include "slotzero/verify/value_iteration.hpp"

namespace sz::verify {

bool SuiteReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string SuiteReport::to_text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", c.seconds);
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << " [" << secs << "]\n";
  }
  out << (passed() ? "all checks passed" : "verification failed") << "\n";
  return out.str();
}

PlannerOracleResult planner_vs_value_iteration(int simulations, int starts, double gamma,
                                               std::uint64_t seed, int depth_cap) {
  env::EnvConfig ec;
  ec.grid_size = 3;
  ec.num_objects = 2;
  const auto mdp = env::enumerate_tabular(ec);
  const auto sol = value_iteration(mdp, gamma);
  const TabularSearchModel model(mdp, sol.value);
  const env::ObjectWorld world(ec);

  planner::PlannerConfig pc;
  pc.simulations = simulations;
  pc.num_candidates = mdp.num_actions;
  pc.num_actions = mdp.num_actions;
  pc.depth_cap = depth_cap;
  pc.gamma = gamma;

  PlannerOracleResult out;
  out.starts = starts;
  int optimal = 0;
  for (int i = 0; i < starts; ++i) {
    const auto start = world.reset(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    const int s = mdp.index_of(start);
    const auto result = planner::run_search(model, TabularSearchModel::Latent{s, 0.0}, pc,
                                            derive_seed(seed, {1000003, static_cast<std::uint64_t>(i)}));
    const double gap = std::abs(result.root_value - sol.value[static_cast<std::size_t>(s)]);
    out.max_value_gap = std::max(out.max_value_gap, gap);
    out.mean_value_gap += gap / starts;
    const int chosen = std::get<int>(result.chosen_action);
    const auto best = sol.optimal_actions(s, 1e-9);
    if (std::find(best.begin(), best.end(), chosen) != best.end()) ++optimal;
  }
  out.optimal_fraction = starts > 0 ? static_cast<double>(optimal) / starts : 0.0;
  return out;
}

double gumbel_first_action_frequency(int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<double> logits{1.0, 0.0};
  int first = 0;
  for (int i = 0; i < draws; ++i) {
    const auto set = planner::gumbel_root_candidates(logits, 1, rng);
    if (set.ids.front() == 0) ++first;
  }
  return static_cast<double>(first) / draws;
}

double sve_max_disagreement(int logs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < logs; ++n) {
    const double gamma = g(rng);
    std::vector<planner::TrajectoryRecord> log(1 + rng() % 32);
    for (auto& rec : log) {
      rec.depth = static_cast<int>(1 + rng() % 12);
      rec.rewards.resize(static_cast<std::size_t>(rec.depth));
      for (double& r : rec.rewards) r = u(rng);
      rec.leaf_value = u(rng);
    }
    const double a = planner::search_value_estimate(log, gamma);
    const double b = sve_bruteforce(log, gamma);
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

namespace {

template <class Fn>
CheckResult timed(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

SuiteReport run_suite(bool fast, std::uint64_t seed) {
  SuiteReport report;

  report.checks.push_back(timed("value_iteration_closed_form", [&](CheckResult& r) {
    env::EnvConfig ec;
    ec.grid_size = 3;
    ec.num_objects = 2;
    const auto mdp = env::enumerate_tabular(ec);
    const double gamma = 0.9;
    const auto sol = value_iteration(mdp, gamma);
    double worst = 0.0;
    bool monotone = true;
    for (std::size_t i = 1; i < sol.residual_history.size(); ++i) {
      monotone = monotone && sol.residual_history[i] <= sol.residual_history[i - 1];
    }
    for (int s = 0; s < mdp.num_states; ++s) {
      if (mdp.terminal[static_cast<std::size_t>(s)]) continue;
      const auto& st = mdp.states[static_cast<std::size_t>(s)];
      const double d = std::abs(st.objects[0].position.x - st.objects[1].position.x) +
                       std::abs(st.objects[0].position.y - st.objects[1].position.y);
      worst = std::max(worst, std::abs(sol.value[static_cast<std::size_t>(s)] - std::pow(gamma, d - 1)));
    }
    r.passed = worst < 1e-9 && monotone && mdp.num_nonterminal() == 72;
    r.detail = fmt("max |V* - gamma^(d-1)| = %.3g over 72 states, residual monotone", worst);
  }));

  report.checks.push_back(timed("sve_bruteforce_agreement", [&](CheckResult& r) {
    const int logs = fast ? 1000 : 10000;
    const double worst = sve_max_disagreement(logs, derive_seed(seed, {1}));
    r.passed = worst <= 1e-12;
    r.detail = fmt("max disagreement %.3g over %.0f logs", worst, logs);
  }));

  report.checks.push_back(timed("mixed_target_td_spot_check", [&](CheckResult& r) {
    const std::vector<double> u{1.0, 0.0};
    const double z = trainer::td_return(u, 0.5, 0.9);
    r.passed = std::abs(z - 1.405) < 1e-12;
    r.detail = fmt("1 + 0.81 * 0.5 -> %.15g", z);
  }));

  for (bool continuous : {false, true}) {
    if (fast && continuous) continue;
    report.checks.push_back(timed(continuous ? "grad_sweep_loss_continuous" : "grad_sweep_loss_discrete",
                                  [&](CheckResult& r) {
      FixtureSpec spec;
      spec.continuous = continuous;
      const auto g = sweep_training_loss(spec, derive_seed(seed, {2}), 1e-4);
      r.passed = g.passed();
      r.detail = fmt("max relative error %.3g", g.max_rel_error) + " (" + g.worst + ")";
    }));
  }

  report.checks.push_back(timed("permutation_stress", [&](CheckResult& r) {
    model::ModelConfig mc;
    const auto params = model::init_params(mc, derive_seed(seed, {3}));
    const int trials = fast ? 100 : 1000;
    const auto p = permutation_stress(params, 4, trials, derive_seed(seed, {4}));
    r.passed = p.passed();
    r.detail = fmt("worst deviation %.3g over %.0f trials (K=4)", p.worst(), trials);
  }));

  report.checks.push_back(timed("gumbel_max_identity", [&](CheckResult& r) {
    const double f = gumbel_first_action_frequency(50000, derive_seed(seed, {5}));
    const double expect = std::exp(1.0) / (std::exp(1.0) + 1.0);
    r.passed = std::abs(f - expect) <= 0.01;
    r.detail = fmt("frequency %.4f vs e/(e+1) = %.4f", f, expect);
  }));

  report.checks.push_back(timed("planner_vs_value_iteration", [&](CheckResult& r) {
    const int starts = fast ? 50 : 500;
    const auto p = planner_vs_value_iteration(1000, starts, 0.97, derive_seed(seed, {6}));
    r.passed = p.max_value_gap <= 0.05 && p.optimal_fraction >= 0.99;
    r.detail = fmt("max |root - V*| = %.4f, optimal choice %.3f", p.max_value_gap, p.optimal_fraction);
  }));

  return report;
}

}  // namespace sz::verify
