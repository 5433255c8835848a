#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sz::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitVerifyFailed = 2, kExitNumericFault = 3 };

/// Environment variable that, when set, prefixes relative output directories.
inline constexpr const char* kOutputRootEnv = "SLOTZERO_OUTPUT_ROOT";

std::filesystem::path resolve_output_dir(const std::string& dir);

struct TrainOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> resume;
  bool quiet = false;
};

struct EvalOptions {
  std::filesystem::path checkpoint;
  int episodes = 50;
  std::optional<std::uint64_t> seed;
};

struct PlotOptions {
  std::filesystem::path metrics;
  std::filesystem::path out;
};

/// Writes config.yaml, metrics.csv, checkpoints/step_<n>.ckpt and final.ckpt under the output dir.
int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);
/// Greedy episodes from a checkpoint, next to a random policy on the same episode seeds.
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(bool fast, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err);

}  // namespace sz::cli
