#include <algorithm>
#include <stdexcept>
#include <string>

#include "slotzero/planner/types.hpp"

namespace sz::planner {

void validate(const PlannerConfig& c) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("planner config: " + what);
  };
  if (c.simulations < 1) fail("simulations must be >= 1");
  if (c.num_candidates < 1) fail("num_candidates must be >= 1");
  if (c.continuous && c.num_candidates < 2) fail("continuous search needs num_candidates >= 2");
  if (c.depth_cap < 1) fail("depth_cap must be >= 1");
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(c.beta >= 0.0 && c.beta <= 1.0)) fail("beta must lie in [0, 1]");
  if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) fail("epsilon must lie in [0, 1)");
  if (!(c.c_visit >= 0.0) || !(c.c_scale >= 0.0)) fail("c_visit and c_scale must be >= 0");
  if (!c.continuous && c.num_actions < 1) fail("num_actions must be >= 1");
  if (c.continuous && c.action_dim < 1) fail("action_dim must be >= 1");
  const int roots = c.continuous ? c.num_candidates : std::min(c.num_candidates, c.num_actions);
  if (c.simulations < roots) {
    fail("simulations (" + std::to_string(c.simulations) + ") below root candidate count (" +
         std::to_string(roots) + ")");
  }
}

}  // namespace sz::planner
