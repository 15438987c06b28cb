#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace babyaipp {

// Cell-encoding tables. These ids are protocol constants; do not renumber.
enum class ObjectType : std::uint8_t {
  unseen = 0,
  empty = 1,
  wall = 2,
  floor = 3,
  key = 5,
  ball = 6,
  box = 7,
  agent = 10,
};

enum class Color : std::uint8_t {
  red = 0,
  green = 1,
  blue = 2,
  purple = 3,
  yellow = 4,
  grey = 5,
  orange = 6,
};

inline constexpr std::size_t kNumColors = 7;
inline constexpr std::array<Color, kNumColors> kAllColors = {
    Color::red,  Color::green, Color::blue,  Color::purple,
    Color::yellow, Color::grey, Color::orange};

// Headings in the order a right turn cycles through them.
enum class Direction : std::uint8_t { east = 0, south = 1, west = 2, north = 3 };

enum class Action : std::uint8_t {
  turn_left = 0,
  turn_right = 1,
  forward = 2,
  pickup = 3,
  drop = 4,
  toggle = 5,
  done = 6,
};

inline constexpr int kNumActions = 7;

std::string_view to_string(ObjectType t);
std::string_view to_string(Color c);
std::string_view to_string(Direction d);
std::string_view to_string(Action a);
std::optional<ObjectType> parse_object_type(std::string_view s);
std::optional<Color> parse_color(std::string_view s);
std::optional<Action> action_from_id(int id);

struct CellCode {
  ObjectType type = ObjectType::empty;
  Color color = Color::red;
  std::uint8_t state = 0;

  static constexpr CellCode unseen() { return {ObjectType::unseen, Color::red, 0}; }
  static constexpr CellCode empty() { return {ObjectType::empty, Color::red, 0}; }
  static constexpr CellCode wall() { return {ObjectType::wall, Color::grey, 0}; }
  static constexpr CellCode floor(Color c) { return {ObjectType::floor, c, 0}; }
  static constexpr CellCode object(ObjectType t, Color c) { return {t, c, 0}; }

  bool is_object() const {
    return type == ObjectType::key || type == ObjectType::ball || type == ObjectType::box;
  }
  bool walkable() const { return type == ObjectType::empty || type == ObjectType::floor; }
  bool see_through() const { return type != ObjectType::wall; }

  friend bool operator==(const CellCode&, const CellCode&) = default;
};

struct Vec2 {
  int x = 0;
  int y = 0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

Vec2 direction_vector(Direction d);
Direction turn_left(Direction d);
Direction turn_right(Direction d);

struct AgentPose {
  int x = 0;
  int y = 0;
  Direction dir = Direction::east;

  Vec2 position() const { return {x, y}; }
  Vec2 front() const;
  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

enum class MoveDirection { forward, backward };

// Pure displacement along/against the heading. No collision or bounds check.
AgentPose geometric_move(const AgentPose& pose, MoveDirection direction);

// Per-tile bookkeeping. Both counters reset when the agent's cell changes and
// saturate at kTimerCap (only values up to 2 affect the dynamics).
struct TileTimers {
  static constexpr std::uint8_t kTimerCap = 3;
  std::uint8_t since_entry = 0;  // actions taken since entering the current tile
  std::uint8_t stay_count = 0;   // consecutive timesteps begun and ended on it

  friend bool operator==(const TileTimers&, const TileTimers&) = default;
};

class GridState {
 public:
  GridState() = default;
  // All cells empty, outer boundary walled.
  GridState(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool in_bounds(Vec2 p) const { return in_bounds(p.x, p.y); }

  const CellCode& at(int x, int y) const { return cells_[index(x, y)]; }
  CellCode& at(int x, int y) { return cells_[index(x, y)]; }
  const CellCode& at(Vec2 p) const { return at(p.x, p.y); }
  CellCode& at(Vec2 p) { return at(p.x, p.y); }

  bool walkable(Vec2 p) const { return in_bounds(p) && at(p).walkable(); }

  const std::vector<CellCode>& cells() const { return cells_; }

  AgentPose agent;
  std::optional<CellCode> carrying;
  TileTimers timers;

  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  std::size_t hash() const;

  friend bool operator==(const GridState&, const GridState&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<CellCode> cells_;
};

struct GridStateHash {
  std::size_t operator()(const GridState& s) const { return s.hash(); }
};

inline constexpr int kViewSize = 7;
inline constexpr std::size_t kSymbolicGridSize = kViewSize * kViewSize * 3;

// Agent-relative 7x7x3 view, row-major [row][col][channel]. Row 0 is the far
// edge of the view; the agent sits at row 6, column 3, facing up.
using SymbolicGrid = std::array<std::uint8_t, kSymbolicGridSize>;

inline std::size_t symbolic_index(int row, int col, int channel) {
  return static_cast<std::size_t>((row * kViewSize + col) * 3 + channel);
}

// World position shown at window cell (row, col) for the given pose.
Vec2 view_to_world(const AgentPose& pose, int row, int col);

SymbolicGrid observe(const GridState& state);

// Visibility mask over the agent-relative window, [row][col].
std::array<std::array<bool, kViewSize>, kViewSize> visibility_mask(const GridState& state);

}  // namespace babyaipp
