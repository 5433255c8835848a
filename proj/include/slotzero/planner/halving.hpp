#pragma once

#include <vector>

namespace sz::planner {

/// Budget split for Sequential Halving over `candidates` root actions with `budget` simulations.
struct HalvingPlan {
  int candidates = 0;
  int budget = 0;
  std::vector<int> phase_budget;     // simulations per phase, sums to budget
  std::vector<int> phase_survivors;  // candidates alive at the start of each phase

  int phases() const { return static_cast<int>(phase_budget.size()); }
};

/// ceil(log2 m) phases (at least one), floor(N / p) simulations each, the remainder going to the
/// last phase. A phase whose share is below its survivor count is topped up to one visit per
/// survivor from the later phases' budget, so every candidate is visited before it can be dropped. Throws std::invalid_argument when budget < candidates or candidates < 1.
HalvingPlan plan_halving(int candidates, int budget);

/// Visits per survivor for one phase, in rank order: an even split with leftovers going to the
/// best-ranked survivors first.
std::vector<int> allocate_phase(int survivors, int phase_budget);

/// Number of candidates kept after a phase with `alive` survivors.
constexpr int survivors_after(int alive) { return alive > 1 ? (alive + 1) / 2 : 1; }

}  // namespace sz::planner
