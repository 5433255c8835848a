#pragma once

#include <span>

#include "slotzero/planner/types.hpp"

namespace sz::verify {

/// Second implementation of the search value estimate: each return is folded from the leaf
/// backwards and the mean is taken with compensated summation.
double sve_bruteforce(std::span<const planner::TrajectoryRecord> log, double gamma);

}  // namespace sz::verify
