#include "slotzero/env/render.hpp"

#include <algorithm>
#include <stdexcept>

namespace sz::env {

namespace {
constexpr std::string_view kEmpty = "·";
constexpr std::string_view kBanner = "DONE";
}  // namespace

std::string render_ascii(const EnvState& state, int grid_size) {
  std::vector<std::string> cells(static_cast<std::size_t>(grid_size) * grid_size,
                                 std::string(kEmpty));
  auto put = [&](const ObjectState& o, const char* mark) {
    const int x = static_cast<int>(o.position.x);
    const int y = static_cast<int>(o.position.y);
    if (x < 0 || y < 0 || x >= grid_size || y >= grid_size) return;
    cells[static_cast<std::size_t>(y) * grid_size + x] = mark;
  };
  for (const auto& o : state.objects) {
    if (o.kind == ObjectKind::target) put(o, "T");
    if (o.kind == ObjectKind::distractor) put(o, "D");
  }
  for (const auto& o : state.objects) {
    if (o.kind == ObjectKind::agent) put(o, "A");
  }
  std::string out;
  for (int y = 0; y < grid_size; ++y) {
    if (y) out += '\n';
    for (int x = 0; x < grid_size; ++x) out += cells[static_cast<std::size_t>(y) * grid_size + x];
  }
  if (state.terminal) {
    out += '\n';
    out += kBanner;
  }
  return out;
}

std::vector<ObjectState> parse_ascii(std::string_view text) {
  std::vector<ObjectState> agents, targets, distractors;
  int x = 0;
  int y = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '\n') {
      ++y;
      x = 0;
      ++i;
      continue;
    }
    if (text.substr(i, kBanner.size()) == kBanner) break;
    if (text.substr(i, kEmpty.size()) == kEmpty) {
      ++x;
      i += kEmpty.size();
      continue;
    }
    const Vec2 pos{static_cast<double>(x), static_cast<double>(y)};
    switch (text[i]) {
      case 'A': agents.push_back({0, ObjectKind::agent, pos}); break;
      case 'T': targets.push_back({0, ObjectKind::target, pos}); break;
      case 'D': distractors.push_back({0, ObjectKind::distractor, pos}); break;
      default: throw std::invalid_argument("parse_ascii: unexpected character");
    }
    ++x;
    ++i;
  }
  std::vector<ObjectState> out;
  for (auto* group : {&agents, &targets, &distractors}) {
    for (auto& o : *group) {
      o.id = static_cast<int>(out.size());
      out.push_back(o);
    }
  }
  return out;
}

}  // namespace sz::env
