#include "slotzero/slots/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sz::slots {

SlotSet::SlotSet(std::size_t slots, std::size_t dim, std::vector<double> values)
    : slots_(slots), dim_(dim), values_(std::move(values)) {
  if (values_.size() != slots_ * dim_) throw std::invalid_argument("SlotSet: size mismatch");
}

bool SlotSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

EpisodePermutation EpisodePermutation::identity(int k) {
  EpisodePermutation p;
  p.row_of.resize(k);
  std::iota(p.row_of.begin(), p.row_of.end(), 0);
  return p;
}

bool EpisodePermutation::valid() const {
  std::vector<char> seen(row_of.size(), 0);
  for (int r : row_of) {
    if (r < 0 || r >= static_cast<int>(row_of.size()) || seen[r]) return false;
    seen[r] = 1;
  }
  return true;
}

EpisodePermutation EpisodePermutation::inverse() const {
  EpisodePermutation inv;
  inv.row_of.resize(row_of.size());
  for (std::size_t i = 0; i < row_of.size(); ++i) inv.row_of[row_of[i]] = static_cast<int>(i);
  return inv;
}

EpisodePermutation EpisodePermutation::compose(const EpisodePermutation& inner) const {
  if (inner.row_of.size() != row_of.size()) throw std::invalid_argument("compose: size mismatch");
  EpisodePermutation out;
  out.row_of.resize(row_of.size());
  for (std::size_t i = 0; i < row_of.size(); ++i) out.row_of[i] = row_of[inner.row_of[i]];
  return out;
}

std::string to_string(PermutationMode mode) {
  return mode == PermutationMode::identity ? "identity" : "random";
}

EpisodePermutation new_episode_permutation(std::uint64_t seed, PermutationMode mode, int k) {
  auto perm = EpisodePermutation::identity(k);
  if (mode == PermutationMode::identity) return perm;
  std::mt19937_64 rng(seed);
  for (int i = k - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(perm.row_of[i], perm.row_of[pick(rng)]);
  }
  return perm;
}

std::string FeatureLayout::describe() {
  return "slot-features v" + std::to_string(kVersion) +
         ": [0..3) kind one-hot (agent,target,distractor); [3..5) position (x,y) in [0,1]; "
         "[5..D) zero";
}

SlotSet encode(const env::EnvState& state, const env::EnvConfig& env_config,
               const EpisodePermutation& perm, const EncoderConfig& config,
               std::uint64_t noise_seed) {
  const auto k = static_cast<std::size_t>(config.num_slots);
  const auto d = static_cast<std::size_t>(config.slot_dim);
  if (d < FeatureLayout::kRawWidth) {
    throw std::invalid_argument("slot_dim " + std::to_string(d) + " below the raw feature width " +
                                std::to_string(FeatureLayout::kRawWidth));
  }
  if (perm.row_of.size() != k || !perm.valid()) {
    throw std::invalid_argument("encode: permutation does not cover the slot count");
  }
  if (state.objects.size() > k) throw std::invalid_argument("encode: more objects than slots");

  const double scale = env_config.variant == env::Variant::discrete
                           ? (env_config.grid_size > 1 ? 1.0 / (env_config.grid_size - 1) : 0.0)
                           : 1.0;
  SlotSet out(k, d);
  std::mt19937_64 rng(noise_seed);
  for (std::size_t i = 0; i < state.objects.size(); ++i) {
    const auto& obj = state.objects[i];
    const auto row = static_cast<std::size_t>(perm.row_of[i]);
    out.at(row, FeatureLayout::kKindOffset + static_cast<std::size_t>(obj.kind)) = 1.0;
    out.at(row, FeatureLayout::kPositionOffset) = obj.position.x * scale;
    out.at(row, FeatureLayout::kPositionOffset + 1) = obj.position.y * scale;
    if (config.noise_sigma > 0.0) {
      for (std::size_t c = 0; c < d; ++c) {
        std::normal_distribution<double> noise(0.0, config.noise_sigma);
        out.at(row, c) += noise(rng);
      }
    }
  }
  return out;
}

}  // namespace sz::slots
