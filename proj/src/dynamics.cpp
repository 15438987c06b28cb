#include "babyaipp/dynamics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace babyaipp {

std::string_view to_string(TileProperty p) {
  switch (p) {
    case TileProperty::normal: return "normal";
    case TileProperty::trap: return "trap";
    case TileProperty::slippery: return "slippery";
    case TileProperty::flip_left_right: return "flipLeftRight";
    case TileProperty::flip_up_down: return "flipUpDown";
    case TileProperty::sticky: return "sticky";
    case TileProperty::magic: return "magic";
  }
  return "?";
}

std::optional<TileProperty> parse_property(std::string_view s) {
  if (s == "normal") return TileProperty::normal;
  for (auto p : kDynamicProperties) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

std::string_view to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::none: return "none";
    case TerminationReason::trap: return "trap";
    case TerminationReason::success: return "success";
    case TerminationReason::timeout: return "timeout";
  }
  return "?";
}

TileProperty DynamicsMap::property_at(Vec2 p) const {
  const auto color = tile_color(p);
  if (!color) return TileProperty::normal;
  return property_of(*color).value_or(TileProperty::normal);
}

std::vector<Color> DynamicsMap::placed_colors() const {
  std::array<bool, kNumColors> seen{};
  for (const auto& c : tile_colors_) {
    if (c) seen[static_cast<std::size_t>(*c)] = true;
  }
  std::vector<Color> out;
  for (auto c : kAllColors) {
    if (seen[static_cast<std::size_t>(c)]) out.push_back(c);
  }
  return out;
}

std::vector<ColorProperty> DynamicsMap::placed_pairs() const {
  std::vector<ColorProperty> out;
  for (auto c : placed_colors()) out.emplace_back(c, property_of(c).value_or(TileProperty::normal));
  return out;
}

DynamicsMap DynamicsMap::as_all_normal() const {
  DynamicsMap out = *this;
  for (auto& m : out.mapping_) {
    if (m) m = TileProperty::normal;
  }
  return out;
}

void DynamicsMap::validate() const {
  for (auto c : placed_colors()) {
    if (!property_of(c))
      throw std::invalid_argument("placed color " + std::string(to_string(c)) + " has no property");
  }
}

void DynamicsMap::validate_against(const GridState& grid) const {
  validate();
  if (grid.width() != width_ || grid.height() != height_)
    throw std::invalid_argument("dynamics layout size does not match grid");
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const auto& cell = grid.at(x, y);
      const auto color = tile_color({x, y});
      if (cell.type == ObjectType::floor && (!color || *color != cell.color))
        throw std::invalid_argument("floor cell without matching tile color");
      if (color && cell.type != ObjectType::floor)
        throw std::invalid_argument("tile color on a non-floor cell");
    }
  }
}

namespace {

constexpr std::uint8_t bump(std::uint8_t v) {
  return static_cast<std::uint8_t>(std::min<int>(v + 1, TileTimers::kTimerCap));
}

// Sticky tiles release the agent on the third action taken on them.
constexpr std::uint8_t kStickyPriorActions = 2;
// Magic tiles act on the second consecutive timestep spent on them.
constexpr std::uint8_t kMagicStay = 2;

void move_agent(GridState& s, Vec2 to) {
  s.agent.x = to.x;
  s.agent.y = to.y;
  s.timers = {};
}

}  // namespace

StepEffect apply_action(GridState& s, Action action, const DynamicsMap& dynamics) {
  const Vec2 start = s.agent.position();
  const TileProperty here = dynamics.property_at(start);

  StepEffect effect;
  effect.time_delta = here == TileProperty::slippery ? 0.5 : 1.0;

  if (here == TileProperty::flip_left_right) {
    if (action == Action::turn_left)
      action = Action::turn_right;
    else if (action == Action::turn_right)
      action = Action::turn_left;
  }

  std::optional<Vec2> target;
  switch (action) {
    case Action::turn_left:
      s.agent.dir = turn_left(s.agent.dir);
      break;
    case Action::turn_right:
      s.agent.dir = turn_right(s.agent.dir);
      break;
    case Action::forward: {
      const auto dir = here == TileProperty::flip_up_down ? MoveDirection::backward
                                                          : MoveDirection::forward;
      target = geometric_move(s.agent, dir).position();
      break;
    }
    case Action::pickup: {
      const Vec2 front = s.agent.front();
      if (!s.carrying && s.in_bounds(front) && s.at(front).is_object()) {
        s.carrying = s.at(front);
        const auto under = dynamics.tile_color(front);
        s.at(front) = under ? CellCode::floor(*under) : CellCode::empty();
      }
      break;
    }
    case Action::drop: {
      const Vec2 front = s.agent.front();
      if (s.carrying && s.in_bounds(front) && s.at(front).type == ObjectType::empty) {
        s.at(front) = *s.carrying;
        s.carrying.reset();
      }
      break;
    }
    case Action::toggle:
    case Action::done:
      break;
  }

  bool moved = false;
  if (target) {
    const bool held = here == TileProperty::sticky && s.timers.since_entry < kStickyPriorActions;
    if (!held && s.walkable(*target)) {
      move_agent(s, *target);
      moved = true;
    }
  }

  if (moved) {
    effect.trapped = dynamics.property_at(s.agent.position()) == TileProperty::trap;
    return effect;
  }

  s.timers.since_entry = bump(s.timers.since_entry);
  s.timers.stay_count = bump(s.timers.stay_count);

  if (here == TileProperty::magic && s.timers.stay_count >= kMagicStay) {
    const Vec2 south{start.x, start.y + 1};
    if (s.walkable(south)) {
      move_agent(s, south);
      effect.trapped = dynamics.property_at(south) == TileProperty::trap;
    }
  }
  return effect;
}

Transition resolve_action(const GridState& state, Action action, const DynamicsMap& dynamics) {
  Transition t{state};
  const StepEffect e = apply_action(t.next_state, action, dynamics);
  t.time_delta = e.time_delta;
  t.terminated = e.trapped;
  t.termination_reason = e.trapped ? TerminationReason::trap : TerminationReason::none;
  return t;
}

}  // namespace babyaipp
