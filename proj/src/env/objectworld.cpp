#include "slotzero/env/objectworld.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace sz::env {

std::string to_string(Variant v) { return v == Variant::discrete ? "discrete" : "continuous"; }
std::string to_string(RewardMode m) { return m == RewardMode::sparse ? "sparse" : "shaped"; }

namespace {

ObjectKind kind_for(int id) {
  if (id == 0) return ObjectKind::agent;
  if (id == 1) return ObjectKind::target;
  return ObjectKind::distractor;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Largest object count that a square lattice with min_separation spacing fits into
// the reset box; reset() may still give up earlier through rejection sampling.
int continuous_capacity(const EnvConfig& c) {
  const double span = 1.0 - 2.0 * c.contact_radius;
  const int per_axis = static_cast<int>(std::floor(span / c.min_separation)) + 1;
  return per_axis * per_axis;
}

}  // namespace

void validate(const EnvConfig& c) {
  if (c.num_objects < 2) throw std::invalid_argument("env.num_objects must be >= 2");
  if (c.horizon < 0) throw std::invalid_argument("env.horizon must be >= 0");
  if (c.variant == Variant::discrete) {
    if (c.grid_size < 1) throw std::invalid_argument("env.grid_size must be >= 1");
  } else {
    if (!(c.contact_radius > 0.0)) throw std::invalid_argument("env.contact_radius must be > 0");
    if (!(c.max_delta > 0.0)) throw std::invalid_argument("env.max_delta must be > 0");
    if (!(c.min_separation > 2.0 * c.contact_radius)) {
      throw std::invalid_argument("env.min_separation must exceed twice env.contact_radius");
    }
    if (!(c.shaped_scale >= 0.0)) throw std::invalid_argument("env.shaped_scale must be >= 0");
  }
}

ObjectWorld::ObjectWorld(EnvConfig config) : config_(config) { validate(config_); }

EnvState ObjectWorld::reset(std::uint64_t seed) const {
  const int k = config_.num_objects;
  std::mt19937_64 rng(seed);
  EnvState state;
  state.objects.resize(k);

  if (config_.variant == Variant::discrete) {
    const int cells = config_.grid_size * config_.grid_size;
    if (k > cells) {
      throw CapacityError("cannot place " + std::to_string(k) + " objects on " +
                          std::to_string(cells) + " cells");
    }
    // Partial Fisher-Yates over cell indices.
    std::vector<int> order(cells);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, cells - 1);
      std::swap(order[i], order[pick(rng)]);
      state.objects[i] = {i, kind_for(i),
                          {static_cast<double>(order[i] % config_.grid_size),
                           static_cast<double>(order[i] / config_.grid_size)}};
    }
    return state;
  }

  if (k > continuous_capacity(config_)) {
    throw CapacityError("cannot place " + std::to_string(k) + " objects with separation " +
                        std::to_string(config_.min_separation));
  }
  const double lo = config_.contact_radius;
  const double hi = 1.0 - config_.contact_radius;
  constexpr int kMaxAttempts = 100000;
  for (int i = 0; i < k; ++i) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts) {
        throw CapacityError("continuous reset could not separate " + std::to_string(k) + " objects");
      }
      std::uniform_real_distribution<double> coord(lo, hi);
      const Vec2 p{coord(rng), coord(rng)};
      const bool clear = std::all_of(state.objects.begin(), state.objects.begin() + i,
                                     [&](const ObjectState& o) {
                                       return distance(o.position, p) >= config_.min_separation;
                                     });
      if (clear) {
        state.objects[i] = {i, kind_for(i), p};
        break;
      }
    }
  }
  return state;
}

StepResult ObjectWorld::step(const EnvState& state, const Action& action) const {
  if (state.terminal) throw ContractViolation("step() called on a terminal state");
  if (config_.variant == Variant::discrete) {
    const int* move = std::get_if<int>(&action);
    if (move == nullptr || *move < 0 || *move >= kNumMoves) {
      throw std::invalid_argument("discrete ObjectWorld expects a move index in [0,5)");
    }
    return step_discrete(state, *move);
  }
  const Vec2* delta = std::get_if<Vec2>(&action);
  if (delta == nullptr) throw std::invalid_argument("continuous ObjectWorld expects a Vec2 action");
  return step_continuous(state, *delta);
}

StepResult ObjectWorld::step_discrete(const EnvState& state, int move) const {
  StepResult result{state, 0.0, false, false};
  EnvState& next = result.state;
  Vec2& pos = next.objects[0].position;
  const double last = config_.grid_size - 1;
  switch (move) {
    case kUp: pos.y = std::max(0.0, pos.y - 1.0); break;
    case kDown: pos.y = std::min(last, pos.y + 1.0); break;
    case kLeft: pos.x = std::max(0.0, pos.x - 1.0); break;
    case kRight: pos.x = std::min(last, pos.x + 1.0); break;
    default: break;
  }
  next.step = state.step + 1;
  for (std::size_t i = 1; i < next.objects.size(); ++i) {
    if (next.objects[i].position == pos) {
      result.reward = next.objects[i].kind == ObjectKind::target ? 1.0 : 0.0;
      result.done = true;
      break;
    }
  }
  if (!result.done && next.step >= config_.effective_horizon()) {
    result.done = true;
    result.truncated = true;
  }
  next.terminal = result.done;
  return result;
}

StepResult ObjectWorld::step_continuous(const EnvState& state, Vec2 delta) const {
  StepResult result{state, 0.0, false, false};
  EnvState& next = result.state;
  Vec2& pos = next.objects[0].position;
  const double bound = config_.max_delta;
  pos.x = std::clamp(pos.x + std::clamp(delta.x, -bound, bound), 0.0, 1.0);
  pos.y = std::clamp(pos.y + std::clamp(delta.y, -bound, bound), 0.0, 1.0);
  next.step = state.step + 1;

  // Nearest object inside the contact radius decides the outcome.
  double nearest = std::numeric_limits<double>::infinity();
  const ObjectState* touched = nullptr;
  for (std::size_t i = 1; i < next.objects.size(); ++i) {
    const double d = distance(pos, next.objects[i].position);
    if (d <= config_.contact_radius && d < nearest) {
      nearest = d;
      touched = &next.objects[i];
    }
  }
  if (touched != nullptr) {
    result.done = true;
    result.reward = touched->kind == ObjectKind::target ? 1.0 : 0.0;
  } else {
    if (config_.reward_mode == RewardMode::shaped) {
      result.reward = -config_.shaped_scale * distance(pos, next.objects[1].position);
    }
    if (next.step >= config_.effective_horizon()) {
      result.done = true;
      result.truncated = true;
    }
  }
  next.terminal = result.done;
  return result;
}

}  // namespace sz::env
