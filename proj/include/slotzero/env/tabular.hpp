#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "slotzero/env/objectworld.hpp"

namespace sz::env {

/// Exact tables of a small discrete ObjectWorld.
///
/// States are object placements with the step counter dropped (no horizon). Contact
/// placements (agent on the target or on a distractor) are terminal and absorbing:
/// every action loops back with reward 0.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<EnvState> states;
  std::vector<int> next;       // [state * num_actions + action]
  std::vector<double> reward;  // [state * num_actions + action]
  std::vector<char> terminal;  // [state]

  int successor(int s, int a) const { return next[static_cast<std::size_t>(s) * num_actions + a]; }
  double reward_of(int s, int a) const { return reward[static_cast<std::size_t>(s) * num_actions + a]; }
  int num_nonterminal() const;
  /// Index of the placement in `state` (step counter ignored); -1 when absent.
  int index_of(const EnvState& state) const;

  std::map<std::vector<int>, int> lookup;  // cell-index key -> state
};

inline constexpr int kTabularMaxGrid = 4;
inline constexpr int kTabularMaxObjects = 3;

/// Rejects anything beyond a 4x4 grid with 3 objects or a continuous variant.
TabularMdp enumerate_tabular(const EnvConfig& config);

}  // namespace sz::env
