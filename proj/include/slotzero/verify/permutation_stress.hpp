#pragma once

#include <cstdint>

#include "slotzero/model/params.hpp"

namespace sz::verify {

struct PermutationReport {
  int trials = 0;
  double max_dynamics_deviation = 0.0;  // |f(P s) - P f(s)|_max
  double max_head_deviation = 0.0;      // |h(P s) - h(s)|_max over reward, value and policy
  double tolerance = 0.0;

  double worst() const;
  bool passed() const { return worst() < tolerance; }
};

/// Random slot sets, actions and row permutations of `slots` objects. With `identity_only`
/// every permutation is the identity.
PermutationReport permutation_stress(const model::ModelParams& params, int slots, int trials,
                                     std::uint64_t seed, double tolerance = 1e-6,
                                     bool identity_only = false);

}  // namespace sz::verify
