#include "babyaipp/grid.hpp"

#include <stdexcept>

namespace babyaipp {

std::string_view to_string(ObjectType t) {
  switch (t) {
    case ObjectType::unseen: return "unseen";
    case ObjectType::empty: return "empty";
    case ObjectType::wall: return "wall";
    case ObjectType::floor: return "floor";
    case ObjectType::key: return "key";
    case ObjectType::ball: return "ball";
    case ObjectType::box: return "box";
    case ObjectType::agent: return "agent";
  }
  return "?";
}

std::string_view to_string(Color c) {
  switch (c) {
    case Color::red: return "red";
    case Color::green: return "green";
    case Color::blue: return "blue";
    case Color::purple: return "purple";
    case Color::yellow: return "yellow";
    case Color::grey: return "grey";
    case Color::orange: return "orange";
  }
  return "?";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::east: return "east";
    case Direction::south: return "south";
    case Direction::west: return "west";
    case Direction::north: return "north";
  }
  return "?";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::turn_left: return "left";
    case Action::turn_right: return "right";
    case Action::forward: return "forward";
    case Action::pickup: return "pickup";
    case Action::drop: return "drop";
    case Action::toggle: return "toggle";
    case Action::done: return "done";
  }
  return "?";
}

std::optional<ObjectType> parse_object_type(std::string_view s) {
  for (auto t : {ObjectType::unseen, ObjectType::empty, ObjectType::wall, ObjectType::floor,
                 ObjectType::key, ObjectType::ball, ObjectType::box, ObjectType::agent}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<Color> parse_color(std::string_view s) {
  for (auto c : kAllColors) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<Action> action_from_id(int id) {
  if (id < 0 || id >= kNumActions) return std::nullopt;
  return static_cast<Action>(id);
}

Vec2 direction_vector(Direction d) {
  switch (d) {
    case Direction::east: return {1, 0};
    case Direction::south: return {0, 1};
    case Direction::west: return {-1, 0};
    case Direction::north: return {0, -1};
  }
  return {0, 0};
}

Direction turn_left(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}

Direction turn_right(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}

Vec2 AgentPose::front() const {
  const Vec2 v = direction_vector(dir);
  return {x + v.x, y + v.y};
}

AgentPose geometric_move(const AgentPose& pose, MoveDirection direction) {
  const Vec2 v = direction_vector(pose.dir);
  const int sign = direction == MoveDirection::forward ? 1 : -1;
  return {pose.x + sign * v.x, pose.y + sign * v.y, pose.dir};
}

GridState::GridState(int width, int height)
    : width_(width),
      height_(height),
      cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
             CellCode::empty()) {
  if (width < 3 || height < 3) throw std::invalid_argument("grid must be at least 3x3");
  for (int x = 0; x < width; ++x) {
    at(x, 0) = CellCode::wall();
    at(x, height - 1) = CellCode::wall();
  }
  for (int y = 0; y < height; ++y) {
    at(0, y) = CellCode::wall();
    at(width - 1, y) = CellCode::wall();
  }
}

void GridState::validate() const {
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
    throw std::invalid_argument("cell array size does not match dimensions");
  for (int x = 0; x < width_; ++x) {
    if (at(x, 0).type != ObjectType::wall || at(x, height_ - 1).type != ObjectType::wall)
      throw std::invalid_argument("outer boundary must be wall");
  }
  for (int y = 0; y < height_; ++y) {
    if (at(0, y).type != ObjectType::wall || at(width_ - 1, y).type != ObjectType::wall)
      throw std::invalid_argument("outer boundary must be wall");
  }
  for (const auto& c : cells_) {
    if (c.type == ObjectType::unseen || c.type == ObjectType::agent)
      throw std::invalid_argument("grid cells may not hold unseen/agent codes");
    if (c.state != 0) throw std::invalid_argument("cell state must be 0");
  }
  if (!walkable(agent.position())) throw std::invalid_argument("agent must stand on a walkable cell");
  if (carrying && !carrying->is_object()) throw std::invalid_argument("agent can only carry objects");
  if (timers.since_entry > TileTimers::kTimerCap || timers.stay_count > TileTimers::kTimerCap)
    throw std::invalid_argument("tile timers out of range");
}

std::size_t GridState::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  feed(static_cast<std::uint64_t>(width_));
  for (const auto& c : cells_) {
    feed(static_cast<std::uint64_t>(c.type) | (static_cast<std::uint64_t>(c.color) << 8));
  }
  feed(static_cast<std::uint64_t>(agent.x) | (static_cast<std::uint64_t>(agent.y) << 16) |
       (static_cast<std::uint64_t>(agent.dir) << 32));
  feed(carrying ? (static_cast<std::uint64_t>(carrying->type) << 8 |
                   static_cast<std::uint64_t>(carrying->color)) + 1
                : 0);
  feed(static_cast<std::uint64_t>(timers.since_entry) << 8 | timers.stay_count);
  return static_cast<std::size_t>(h);
}

Vec2 view_to_world(const AgentPose& pose, int row, int col) {
  const Vec2 fwd = direction_vector(pose.dir);
  const Vec2 right{-fwd.y, fwd.x};
  const int ahead = (kViewSize - 1) - row;
  const int lateral = col - kViewSize / 2;
  return {pose.x + ahead * fwd.x + lateral * right.x, pose.y + ahead * fwd.y + lateral * right.y};
}

namespace {

using Window = std::array<std::array<CellCode, kViewSize>, kViewSize>;
using Mask = std::array<std::array<bool, kViewSize>, kViewSize>;

constexpr int kAgentRow = kViewSize - 1;
constexpr int kAgentCol = kViewSize / 2;

// Out-of-bounds cells come back as unseen and block sight.
Window gather_window(const GridState& state) {
  Window w{};
  for (int r = 0; r < kViewSize; ++r) {
    for (int c = 0; c < kViewSize; ++c) {
      const Vec2 p = view_to_world(state.agent, r, c);
      w[r][c] = state.in_bounds(p) ? state.at(p) : CellCode::unseen();
    }
  }
  // The agent's own cell shows what it carries, otherwise the ground under it.
  if (state.carrying) w[kAgentRow][kAgentCol] = *state.carrying;
  return w;
}

bool blocks_sight(const CellCode& c) {
  return c.type == ObjectType::unseen || !c.see_through();
}

// Row sweep propagation from the agent towards the far edge of the view.
Mask propagate_visibility(const Window& w) {
  Mask m{};
  m[kAgentRow][kAgentCol] = true;
  for (int r = kAgentRow; r >= 0; --r) {
    for (int c = 0; c < kViewSize - 1; ++c) {
      if (!m[r][c] || blocks_sight(w[r][c])) continue;
      m[r][c + 1] = true;
      if (r > 0) {
        m[r - 1][c + 1] = true;
        m[r - 1][c] = true;
      }
    }
    for (int c = kViewSize - 1; c > 0; --c) {
      if (!m[r][c] || blocks_sight(w[r][c])) continue;
      m[r][c - 1] = true;
      if (r > 0) {
        m[r - 1][c - 1] = true;
        m[r - 1][c] = true;
      }
    }
  }
  return m;
}

}  // namespace

std::array<std::array<bool, kViewSize>, kViewSize> visibility_mask(const GridState& state) {
  return propagate_visibility(gather_window(state));
}

SymbolicGrid observe(const GridState& state) {
  const Window w = gather_window(state);
  const Mask m = propagate_visibility(w);
  SymbolicGrid out{};
  for (int r = 0; r < kViewSize; ++r) {
    for (int c = 0; c < kViewSize; ++c) {
      const CellCode code = m[r][c] ? w[r][c] : CellCode::unseen();
      if (code.type == ObjectType::unseen) continue;  // zero-filled
      out[symbolic_index(r, c, 0)] = static_cast<std::uint8_t>(code.type);
      out[symbolic_index(r, c, 1)] = static_cast<std::uint8_t>(code.color);
      out[symbolic_index(r, c, 2)] = code.state;
    }
  }
  return out;
}

}  // namespace babyaipp
