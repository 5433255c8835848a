#include "slotzero/env/tabular.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sz::env {

namespace {

// Placement key; grids are at most 4 wide so the base is generous.
std::vector<int> placement_key(const EnvState& s) {
  std::vector<int> key;
  key.reserve(s.objects.size());
  for (const auto& o : s.objects) {
    key.push_back(static_cast<int>(o.position.y) * 100 + static_cast<int>(o.position.x));
  }
  return key;
}

bool agent_in_contact(const EnvState& s) {
  for (std::size_t i = 1; i < s.objects.size(); ++i) {
    if (s.objects[i].position == s.objects[0].position) return true;
  }
  return false;
}

}  // namespace

int TabularMdp::num_nonterminal() const {
  return static_cast<int>(std::count(terminal.begin(), terminal.end(), 0));
}

int TabularMdp::index_of(const EnvState& state) const {
  const auto it = lookup.find(placement_key(state));
  return it == lookup.end() ? -1 : it->second;
}

TabularMdp enumerate_tabular(const EnvConfig& config) {
  if (config.variant != Variant::discrete) {
    throw std::invalid_argument("enumerate_tabular needs the discrete variant");
  }
  const int g = config.grid_size;
  const int k = config.num_objects;
  if (g > kTabularMaxGrid || k > kTabularMaxObjects) {
    throw CapacityError("state space above the enumeration cap (grid <= 4, objects <= 3)");
  }
  validate(config);
  const int cells = g * g;
  if (k > cells) throw CapacityError("more objects than cells");

  EnvConfig unbounded = config;
  unbounded.horizon = std::numeric_limits<int>::max();
  const ObjectWorld world(unbounded);

  TabularMdp mdp;
  mdp.num_actions = kNumMoves;

  // Non-agent objects on distinct cells, the agent anywhere.
  std::vector<int> placement(k, 0);
  auto emit = [&]() {
    EnvState s;
    for (int i = 0; i < k; ++i) {
      s.objects.push_back({i, i == 0 ? ObjectKind::agent
                              : i == 1 ? ObjectKind::target
                                       : ObjectKind::distractor,
                           {static_cast<double>(placement[i] % g),
                            static_cast<double>(placement[i] / g)}});
    }
    s.terminal = agent_in_contact(s);
    mdp.lookup.emplace(placement_key(s), static_cast<int>(mdp.states.size()));
    mdp.terminal.push_back(s.terminal ? 1 : 0);
    mdp.states.push_back(std::move(s));
  };
  auto recurse = [&](auto&& self, int index) -> void {
    if (index == k) {
      emit();
      return;
    }
    for (int c = 0; c < cells; ++c) {
      bool clash = false;
      for (int j = 1; j < index; ++j) clash = clash || placement[j] == c;
      if (index > 0 && clash) continue;
      placement[index] = c;
      self(self, index + 1);
    }
  };
  recurse(recurse, 0);
  mdp.num_states = static_cast<int>(mdp.states.size());

  mdp.next.resize(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions);
  mdp.reward.resize(mdp.next.size());
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      const std::size_t slot = static_cast<std::size_t>(s) * mdp.num_actions + a;
      if (mdp.terminal[s]) {
        mdp.next[slot] = s;
        mdp.reward[slot] = 0.0;
        continue;
      }
      const auto result = world.step(mdp.states[s], a);
      mdp.next[slot] = mdp.index_of(result.state);
      mdp.reward[slot] = result.reward;
      if (mdp.next[slot] < 0) throw std::logic_error("enumerate_tabular: successor not enumerated");
    }
  }
  return mdp;
}

}  // namespace sz::env
