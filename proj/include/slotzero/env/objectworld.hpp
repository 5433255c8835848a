#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sz::env {

enum class Variant { discrete, continuous };
enum class RewardMode { sparse, shaped };
enum class ObjectKind { agent, target, distractor };

std::string to_string(Variant v);
std::string to_string(RewardMode m);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct ObjectState {
  int id = 0;
  ObjectKind kind = ObjectKind::agent;
  Vec2 position;  // grid cell (integer valued) or arena coordinates in [0,1]^2
  bool operator==(const ObjectState&) const = default;
};

/// Object 0 is the agent, object 1 the target, the rest are distractors.
struct EnvState {
  std::vector<ObjectState> objects;
  int step = 0;
  bool terminal = false;
  bool operator==(const EnvState&) const = default;

  const ObjectState& agent() const { return objects.at(0); }
};

/// Discrete moves; the y axis grows downwards, matching the rendered grid.
enum Move : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };
inline constexpr int kNumMoves = 5;

/// A move index (discrete variant) or a displacement (continuous variant).
using Action = std::variant<int, Vec2>;

struct StepResult {
  EnvState state;
  double reward = 0.0;
  bool done = false;
  bool truncated = false;  // ended by the horizon rather than by contact
};

struct EnvConfig {
  Variant variant = Variant::discrete;
  int grid_size = 5;       // discrete arena is grid_size x grid_size cells
  int num_objects = 3;     // agent + target + (num_objects - 2) distractors
  int horizon = 0;         // 0 selects the variant default: 50 discrete, 100 continuous
  RewardMode reward_mode = RewardMode::sparse;  // shaped applies to the continuous variant
  double contact_radius = 0.05;
  double max_delta = 0.1;
  double shaped_scale = 0.01;
  double min_separation = 0.2;  // continuous reset spacing between objects

  int effective_horizon() const {
    if (horizon > 0) return horizon;
    return variant == Variant::discrete ? 50 : 100;
  }
  bool operator==(const EnvConfig&) const = default;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CapacityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Object reaching in a 2-D arena: touching the target ends the episode with reward 1,
/// touching a distractor first ends it with reward 0.
///
/// step() is a pure function of its arguments; the world object holds only configuration.
class ObjectWorld {
 public:
  explicit ObjectWorld(EnvConfig config);

  const EnvConfig& config() const { return config_; }

  /// Deterministic in `seed`; objects occupy distinct cells (discrete) or keep
  /// min_separation from each other (continuous).
  EnvState reset(std::uint64_t seed) const;

  StepResult step(const EnvState& state, const Action& action) const;

 private:
  StepResult step_discrete(const EnvState& state, int move) const;
  StepResult step_continuous(const EnvState& state, Vec2 delta) const;

  EnvConfig config_;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const EnvConfig& config);

}  // namespace sz::env
