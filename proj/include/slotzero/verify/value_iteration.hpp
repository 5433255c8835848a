#pragma once

#include <vector>

#include "slotzero/env/tabular.hpp"

namespace sz::verify {

struct TabularSolution {
  std::vector<double> value;  // V*(s)
  std::vector<double> q;      // Q*(s, a) at [s * num_actions + a]
  int iterations = 0;
  double residual = 0.0;      // max |V_{n+1} - V_n| of the last sweep
  std::vector<double> residual_history;
  int num_actions = 0;

  double q_of(int s, int a) const { return q[static_cast<std::size_t>(s) * num_actions + a]; }
  /// Actions whose Q lies within `tol` of V*(s).
  std::vector<int> optimal_actions(int s, double tol = 1e-9) const;
};

/// Synchronous Bellman optimality sweeps until the residual drops below `tol`.
/// Rejects gamma outside [0, 1).
TabularSolution value_iteration(const env::TabularMdp& mdp, double gamma, double tol = 1e-12,
                                int max_iterations = 100000);

}  // namespace sz::verify
