#pragma once

#include <limits>
#include <span>
#include <vector>

#include "slotzero/planner/types.hpp"

namespace sz::planner {

inline constexpr double kQRangeFloor = 0.01;

/// Running bounds of the Q values seen in one tree.
struct MinMax {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void update(double q);
  bool empty() const { return lo > hi; }
  /// (q - lo) / max(hi - lo, floor), clamped to [0, 1]; 0 while no value was seen.
  double normalize(double q) const;
};

/// (c_visit + max_visits) * c_scale * q_hat.
double visit_scale(int max_visits, const PlannerConfig& config);

/// Q for visited actions, `fallback` for the rest.
std::vector<double> completed_q(std::span<const int> visits, std::span<const double> q,
                                double fallback);

/// softmax(logits + sigma(normalized completed Q)) over every action.
std::vector<double> improved_policy(std::span<const double> logits, std::span<const int> visits,
                                    std::span<const double> q, double fallback,
                                    const MinMax& bounds, const PlannerConfig& config);

/// Target policy: the improved policy restricted to visited actions and renormalised, then mixed
/// (1 - eps) * that + eps * softmax(logits). A single action gets probability one.
std::vector<double> make_target_policy(std::span<const double> logits, std::span<const int> visits,
                                       std::span<const double> q, double fallback,
                                       const MinMax& bounds, const PlannerConfig& config);

/// Deterministic interior selection: argmax of pi'(a) - N(a) / (1 + sum N), ties to lower index.
int select_interior(std::span<const double> logits, std::span<const int> visits,
                    std::span<const double> q, double fallback, const MinMax& bounds,
                    const PlannerConfig& config);

std::vector<double> softmax(std::span<const double> x);

}  // namespace sz::planner
