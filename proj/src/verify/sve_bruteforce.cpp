#include "slotzero/verify/sve_bruteforce.hpp"

#include <stdexcept>

namespace sz::verify {

double sve_bruteforce(std::span<const planner::TrajectoryRecord> log, double gamma) {
  if (log.empty()) throw std::invalid_argument("sve_bruteforce: empty log");
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t n = log.size(); n-- > 0;) {
    const auto& rec = log[n];
    double g = rec.leaf_value;
    for (std::size_t t = rec.rewards.size(); t-- > 0;) g = rec.rewards[t] + gamma * g;
    const double y = g - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  return sum / static_cast<double>(log.size());
}

}  // namespace sz::verify
