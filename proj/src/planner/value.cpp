#include "slotzero/planner/value.hpp"

#include <stdexcept>

namespace sz::planner {

double trajectory_return(const TrajectoryRecord& record, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : record.rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total + discount * record.leaf_value;
}

double search_value_estimate(std::span<const TrajectoryRecord> log, double gamma) {
  if (log.empty()) throw std::invalid_argument("search_value_estimate: empty trajectory log");
  double sum = 0.0;
  for (const auto& record : log) sum += trajectory_return(record, gamma);
  return sum / static_cast<double>(log.size());
}

}  // namespace sz::planner
