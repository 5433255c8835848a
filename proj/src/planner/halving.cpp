#include "slotzero/planner/halving.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sz::planner {

HalvingPlan plan_halving(int candidates, int budget) {
  if (candidates < 1) throw std::invalid_argument("plan_halving: need at least one candidate");
  if (budget < candidates) {
    throw std::invalid_argument("plan_halving: budget " + std::to_string(budget) +
                                " is below candidate count " + std::to_string(candidates));
  }
  int phases = 0;
  while ((1 << phases) < candidates) ++phases;
  phases = phases == 0 ? 1 : phases;

  HalvingPlan plan;
  plan.candidates = candidates;
  plan.budget = budget;
  const int share = budget / phases;
  int alive = candidates;
  int remaining = budget;
  for (int p = 0; p < phases; ++p) {
    const int spend = p + 1 == phases ? remaining : std::min(remaining, std::max(share, alive));
    plan.phase_budget.push_back(spend);
    plan.phase_survivors.push_back(alive);
    remaining -= spend;
    alive = survivors_after(alive);
  }
  return plan;
}

std::vector<int> allocate_phase(int survivors, int phase_budget) {
  if (survivors < 1) throw std::invalid_argument("allocate_phase: no survivors");
  std::vector<int> visits(static_cast<std::size_t>(survivors), phase_budget / survivors);
  for (int i = 0; i < phase_budget % survivors; ++i) ++visits[static_cast<std::size_t>(i)];
  return visits;
}

}  // namespace sz::planner
