#include "slotzero/verify/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sz::verify {

std::vector<int> TabularSolution::optimal_actions(int s, double tol) const {
  std::vector<int> out;
  for (int a = 0; a < num_actions; ++a) {
    if (std::abs(q_of(s, a) - value[static_cast<std::size_t>(s)]) <= tol) out.push_back(a);
  }
  return out;
}

TabularSolution value_iteration(const env::TabularMdp& mdp, double gamma, double tol,
                                int max_iterations) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("value_iteration: gamma must lie in [0, 1)");
  }
  const auto n = static_cast<std::size_t>(mdp.num_states);
  const auto na = static_cast<std::size_t>(mdp.num_actions);
  TabularSolution sol;
  sol.num_actions = mdp.num_actions;
  sol.value.assign(n, 0.0);
  sol.q.assign(n * na, 0.0);
  std::vector<double> next(n, 0.0);
  for (int it = 0; it < max_iterations; ++it) {
    double residual = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double best = -INFINITY;
      for (std::size_t a = 0; a < na; ++a) {
        const std::size_t sa = s * na + a;
        const double q = mdp.reward[sa] + gamma * sol.value[static_cast<std::size_t>(mdp.next[sa])];
        sol.q[sa] = q;
        best = std::max(best, q);
      }
      next[s] = best;
      residual = std::max(residual, std::abs(best - sol.value[s]));
    }
    sol.value.swap(next);
    sol.iterations = it + 1;
    sol.residual = residual;
    sol.residual_history.push_back(residual);
    if (residual < tol) break;
  }
  // Q consistent with the returned V.
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      const std::size_t sa = s * na + a;
      sol.q[sa] = mdp.reward[sa] + gamma * sol.value[static_cast<std::size_t>(mdp.next[sa])];
    }
  }
  return sol;
}

}  // namespace sz::verify
