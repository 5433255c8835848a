#pragma once

#include <random>
#include <span>

#include "slotzero/planner/types.hpp"

namespace sz::planner {

/// Draws g(a) ~ Gumbel(0, 1) for every action, scores g(a) + logits(a) and keeps the top
/// `m` (ties to the lower index). With `add_noise` false, g is identically zero.
CandidateSet gumbel_root_candidates(std::span<const double> logits, int m, std::mt19937_64& rng,
                                    bool add_noise = true);

/// Samples `count` candidate actions: each comes from the policy Gaussian with
/// probability `beta` and from the uniform box prior otherwise. All samples are kept;
/// their logits are zero and Gumbel scores only break ties.
CandidateSet gumbel_root_candidates(const model::GaussianPolicy& policy, int count, double beta,
                                    std::mt19937_64& rng, bool add_noise = true);

/// Candidate actions for an interior continuous node (same mixture, no Gumbel draws).
std::vector<ModelAction> sample_mixture_actions(const model::GaussianPolicy& policy, int count,
                                                double beta, std::mt19937_64& rng);

double sample_gumbel(std::mt19937_64& rng);

}  // namespace sz::planner
