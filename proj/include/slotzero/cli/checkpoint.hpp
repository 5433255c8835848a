#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "slotzero/trainer/config.hpp"
#include "slotzero/trainer/run.hpp"

namespace sz::cli {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  trainer::RunConfig config;
  std::string feature_layout;
  trainer::TrainingState state;
};

/// Layout: magic "SZCKPT\0\0", u32 version, u64 payload size, payload, u32 crc32(payload).
/// The payload carries the config, feature layout, params, optimizer moments, counters,
/// replay contents, the episode in flight and the metrics history. All randomness in a run
/// derives from the seed and those counters, so they are the full random state.
std::string encode_checkpoint(const trainer::RunConfig& config, const trainer::TrainingState& state);
Checkpoint decode_checkpoint(const std::string& bytes);

/// Writes through a temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const trainer::RunConfig& config,
                     const trainer::TrainingState& state);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sz::cli
