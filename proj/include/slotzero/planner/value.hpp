#pragma once

#include <span>

#include "slotzero/planner/types.hpp"

namespace sz::planner {

/// sum_t gamma^t r_t + gamma^H V(leaf) for one simulation, H = rewards.size().
double trajectory_return(const TrajectoryRecord& record, double gamma);

/// Mean of trajectory_return over the log. Throws std::invalid_argument on an empty log.
double search_value_estimate(std::span<const TrajectoryRecord> log, double gamma);

}  // namespace sz::planner
