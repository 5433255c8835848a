#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sz::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  /// One "PASS name: detail" / "FAIL name: detail" line per check.
  std::string to_text() const;
};

/// Searches the exact 3x3 two-object tables from seeded starts and compares against V*.
struct PlannerOracleResult {
  int starts = 0;
  double max_value_gap = 0.0;   // |root value - V*(s0)|
  double mean_value_gap = 0.0;
  double optimal_fraction = 0.0;
};

/// Leaves carry exact V*, so `depth_cap` trades lookahead against in-tree averaging over
/// non-greedy paths (the root value is a running average).
PlannerOracleResult planner_vs_value_iteration(int simulations, int starts, double gamma,
                                               std::uint64_t seed, int depth_cap = 2);

/// Frequency with which action 0 wins the root draw for logits (1, 0).
double gumbel_first_action_frequency(int draws, std::uint64_t seed);

/// Max |planner SVE - brute force| over random logs.
double sve_max_disagreement(int logs, std::uint64_t seed);

/// Runs every oracle; `fast` shrinks trial counts.
SuiteReport run_suite(bool fast, std::uint64_t seed = 7);

}  // namespace sz::verify
