#include "slotzero/verify/permutation_stress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "slotzero/model/gnn.hpp"

namespace sz::verify {

double PermutationReport::worst() const {
  return std::max(max_dynamics_deviation, max_head_deviation);
}

namespace {

slots::SlotSet permute_rows(const slots::SlotSet& s, const std::vector<int>& order) {
  // Row i of the result is row order[i] of the input.
  slots::SlotSet out(s.slots(), s.dim());
  for (std::size_t i = 0; i < s.slots(); ++i) {
    for (std::size_t c = 0; c < s.dim(); ++c) {
      out.at(i, c) = s.at(static_cast<std::size_t>(order[i]), c);
    }
  }
  return out;
}

double max_gap(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

PermutationReport permutation_stress(const model::ModelParams& params, int slots, int trials,
                                     std::uint64_t seed, double tolerance, bool identity_only) {
  PermutationReport report;
  report.trials = trials;
  report.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  const auto& spec = params.config.action;
  const auto k = static_cast<std::size_t>(slots);
  const auto d = static_cast<std::size_t>(params.config.slot_dim);
  for (int t = 0; t < trials; ++t) {
    slots::SlotSet s(k, d);
    for (double& v : s.storage()) v = normal(rng);
    model::ModelAction action;
    if (spec.continuous) {
      std::vector<double> a(static_cast<std::size_t>(spec.action_dim));
      for (double& x : a) x = box(rng);
      action = a;
    } else {
      action = static_cast<int>(rng() % static_cast<std::uint64_t>(spec.num_actions));
    }
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    if (!identity_only) std::shuffle(order.begin(), order.end(), rng);

    const slots::SlotSet ps = permute_rows(s, order);
    const slots::SlotSet f = model::dynamics_step(params, s, action);
    const slots::SlotSet fp = model::dynamics_step(params, ps, action);
    report.max_dynamics_deviation =
        std::max(report.max_dynamics_deviation, max_gap(fp.values(), permute_rows(f, order).values()));

    const auto h = model::predict_heads(params, s);
    const auto hp = model::predict_heads(params, ps);
    double gap = std::max(std::abs(h.reward - hp.reward), std::abs(h.value - hp.value));
    gap = std::max(gap, max_gap(h.logits, hp.logits));
    gap = std::max(gap, max_gap(h.mean, hp.mean));
    gap = std::max(gap, max_gap(h.log_std, hp.log_std));
    report.max_head_deviation = std::max(report.max_head_deviation, gap);
  }
  return report;
}

}  // namespace sz::verify
