#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slotzero/env/objectworld.hpp"

namespace sz::env {

/// Text grid of a discrete state: one line per row, `A` agent, `T` target, `D`
/// distractor, `·` empty. The agent is drawn over anything it touches. Terminal
/// states get a trailing `DONE` line.
std::string render_ascii(const EnvState& state, int grid_size);

/// Inverse of render_ascii for the object markers (ids follow A, T, then D in reading order).
std::vector<ObjectState> parse_ascii(std::string_view text);

}  // namespace sz::env
