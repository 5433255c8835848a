#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "slotzero/trainer/config.hpp"

namespace sz::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses YAML text. Missing keys keep their defaults; unknown keys, malformed values and
/// constraint violations throw ConfigError naming the key and, for parse problems, the line.
trainer::RunConfig parse_config(const std::string& text);
trainer::RunConfig load_config(const std::filesystem::path& path);

/// Every field, in a fixed order, as YAML that parse_config reads back to an equal config.
std::string serialize_config(const trainer::RunConfig& config);

/// Applies one "section.key=value" override (or "seed=..."/"output_dir=...").
void apply_override(trainer::RunConfig& config, const std::string& assignment);

/// Dotted names of every accepted key, in serialisation order.
std::vector<std::string> config_keys();

}  // namespace sz::cli
