#include "slotzero/planner/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sz::planner {

void MinMax::update(double q) {
  lo = std::min(lo, q);
  hi = std::max(hi, q);
}

double MinMax::normalize(double q) const {
  if (empty()) return 0.0;
  const double span = std::max(hi - lo, kQRangeFloor);
  return std::clamp((q - lo) / span, 0.0, 1.0);
}

double visit_scale(int max_visits, const PlannerConfig& config) {
  return (config.c_visit + max_visits) * config.c_scale;
}

std::vector<double> softmax(std::span<const double> x) {
  if (x.empty()) return {};
  const double peak = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - peak);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> completed_q(std::span<const int> visits, std::span<const double> q,
                                double fallback) {
  if (visits.size() != q.size()) throw std::invalid_argument("completed_q: size mismatch");
  std::vector<double> out(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) out[a] = visits[a] > 0 ? q[a] : fallback;
  return out;
}

std::vector<double> improved_policy(std::span<const double> logits, std::span<const int> visits,
                                    std::span<const double> q, double fallback,
                                    const MinMax& bounds, const PlannerConfig& config) {
  if (logits.size() != visits.size()) throw std::invalid_argument("improved_policy: size mismatch");
  const auto cq = completed_q(visits, q, fallback);
  const int max_visits = visits.empty() ? 0 : *std::max_element(visits.begin(), visits.end());
  const double scale = visit_scale(max_visits, config);
  std::vector<double> z(logits.size());
  for (std::size_t a = 0; a < z.size(); ++a) z[a] = logits[a] + scale * bounds.normalize(cq[a]);
  return softmax(z);
}

std::vector<double> make_target_policy(std::span<const double> logits, std::span<const int> visits,
                                       std::span<const double> q, double fallback,
                                       const MinMax& bounds, const PlannerConfig& config) {
  const std::size_t n = logits.size();
  if (n == 1) return {1.0};
  auto pi = improved_policy(logits, visits, q, fallback, bounds, config);
  double visited_mass = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (visits[a] > 0) {
      visited_mass += pi[a];
    } else {
      pi[a] = 0.0;
    }
  }
  const auto prior = softmax(logits);
  if (visited_mass <= 0.0) return prior;
  for (std::size_t a = 0; a < n; ++a) {
    pi[a] = (1.0 - config.epsilon) * pi[a] / visited_mass + config.epsilon * prior[a];
  }
  return pi;
}

int select_interior(std::span<const double> logits, std::span<const int> visits,
                    std::span<const double> q, double fallback, const MinMax& bounds,
                    const PlannerConfig& config) {
  const auto pi = improved_policy(logits, visits, q, fallback, bounds, config);
  const double total = std::accumulate(visits.begin(), visits.end(), 0.0);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pi.size(); ++a) {
    const double score = pi[a] - visits[a] / (1.0 + total);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(a);
    }
  }
  return best;
}

}  // namespace sz::planner
