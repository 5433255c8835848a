#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slotzero/env/objectworld.hpp"

namespace sz::slots {

/// K x D row-major matrix of object slots. Rows carry no intrinsic order.
class SlotSet {
 public:
  SlotSet() = default;
  SlotSet(std::size_t slots, std::size_t dim) : slots_(slots), dim_(dim), values_(slots * dim, 0.0) {}
  SlotSet(std::size_t slots, std::size_t dim, std::vector<double> values);

  std::size_t slots() const { return slots_; }
  std::size_t dim() const { return dim_; }
  double& at(std::size_t row, std::size_t col) { return values_[row * dim_ + col]; }
  double at(std::size_t row, std::size_t col) const { return values_[row * dim_ + col]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * dim_, dim_}; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }
  bool all_finite() const;

  bool operator==(const SlotSet&) const = default;

 private:
  std::size_t slots_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// Maps object i to slot row `row_of[i]`; held fixed for a whole episode so the same
/// object keeps its row from step to step.
struct EpisodePermutation {
  std::vector<int> row_of;

  static EpisodePermutation identity(int k);
  bool valid() const;
  EpisodePermutation inverse() const;
  /// (this o inner)(i) = this(inner(i))
  EpisodePermutation compose(const EpisodePermutation& inner) const;
  bool operator==(const EpisodePermutation&) const = default;
};

enum class PermutationMode { identity, random_per_episode };

std::string to_string(PermutationMode mode);

/// Identity mode ignores the seed; random mode is uniform over all k! orderings.
EpisodePermutation new_episode_permutation(std::uint64_t seed, PermutationMode mode, int k);

/// Per-row layout: kind one-hot (agent, target, distractor), then the position scaled
/// to [0,1] (discrete cells divide by grid_size - 1), then zero padding up to the slot dim.
struct FeatureLayout {
  static constexpr std::size_t kKindOffset = 0;
  static constexpr std::size_t kKindWidth = 3;
  static constexpr std::size_t kPositionOffset = 3;
  static constexpr std::size_t kPositionWidth = 2;
  static constexpr std::size_t kRawWidth = 5;
  static constexpr int kVersion = 1;

  static std::string describe();
};

struct EncoderConfig {
  int num_slots = 3;  // K: maximum object count
  int slot_dim = 16;  // D
  double noise_sigma = 0.0;
  bool operator==(const EncoderConfig&) const = default;
};

/// Ground-truth slots for `state`. Rows of absent objects stay zero; live rows get
/// i.i.d. N(0, noise_sigma^2) noise drawn from `noise_seed`.
SlotSet encode(const env::EnvState& state, const env::EnvConfig& env_config,
               const EpisodePermutation& perm, const EncoderConfig& config,
               std::uint64_t noise_seed = 0);

}  // namespace sz::slots
