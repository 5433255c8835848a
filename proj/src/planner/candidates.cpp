#include "slotzero/planner/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sz::planner {

double sample_gumbel(std::mt19937_64& rng) {
  // u in (0, 1]: generate_canonical gives [0, 1).
  const double u = 1.0 - std::generate_canonical<double, 53>(rng);
  return -std::log(-std::log(std::max(u, std::numeric_limits<double>::min())));
}

namespace {

void rank_by_score(CandidateSet& set, int keep) {
  std::vector<int> order(set.actions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return set.score(a) > set.score(b); });
  order.resize(static_cast<std::size_t>(keep));
  set.ids = std::move(order);
}

}  // namespace

CandidateSet gumbel_root_candidates(std::span<const double> logits, int m, std::mt19937_64& rng,
                                    bool add_noise) {
  if (logits.empty()) throw std::invalid_argument("gumbel_root_candidates: no actions");
  for (double l : logits) {
    if (!std::isfinite(l)) throw std::invalid_argument("gumbel_root_candidates: non-finite logit");
  }
  if (m < 1) throw std::invalid_argument("gumbel_root_candidates: m must be >= 1");
  CandidateSet set;
  set.logits.assign(logits.begin(), logits.end());
  set.gumbel.resize(logits.size(), 0.0);
  for (std::size_t a = 0; a < logits.size(); ++a) {
    set.actions.emplace_back(static_cast<int>(a));
    if (add_noise) set.gumbel[a] = sample_gumbel(rng);
  }
  rank_by_score(set, std::min<int>(m, static_cast<int>(logits.size())));
  return set;
}

std::vector<ModelAction> sample_mixture_actions(const model::GaussianPolicy& policy, int count,
                                                double beta, std::mt19937_64& rng) {
  std::vector<ModelAction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    const bool from_policy = std::generate_canonical<double, 53>(rng) < beta;
    if (from_policy) {
      out.emplace_back(model::gaussian_sample(policy, 1, rng).front());
    } else {
      std::uniform_real_distribution<double> box(-policy.bound, policy.bound);
      std::vector<double> a(policy.mean.size());
      for (auto& x : a) x = box(rng);
      out.emplace_back(std::move(a));
    }
  }
  return out;
}

CandidateSet gumbel_root_candidates(const model::GaussianPolicy& policy, int count, double beta,
                                    std::mt19937_64& rng, bool add_noise) {
  if (count < 2) throw std::invalid_argument("continuous root needs at least 2 candidates");
  for (double v : policy.mean) {
    if (!std::isfinite(v)) throw std::invalid_argument("gumbel_root_candidates: non-finite mean");
  }
  CandidateSet set;
  set.actions = sample_mixture_actions(policy, count, beta, rng);
  set.logits.assign(set.actions.size(), 0.0);
  set.gumbel.assign(set.actions.size(), 0.0);
  if (add_noise) {
    for (auto& g : set.gumbel) g = sample_gumbel(rng);
  }
  rank_by_score(set, count);
  return set;
}

}  // namespace sz::planner
