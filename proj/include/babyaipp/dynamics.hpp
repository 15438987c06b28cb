#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "babyaipp/grid.hpp"

namespace babyaipp {

enum class TileProperty : std::uint8_t {
  normal = 0,
  trap,
  slippery,
  flip_left_right,
  flip_up_down,
  sticky,
  magic,
};

// The six dynamic properties, in canonical order.
inline constexpr std::array<TileProperty, 6> kDynamicProperties = {
    TileProperty::trap,         TileProperty::slippery, TileProperty::flip_left_right,
    TileProperty::flip_up_down, TileProperty::sticky,   TileProperty::magic};

// Wire names: "trap", "slippery", "flipLeftRight", "flipUpDown", "sticky", "magic", "normal".
std::string_view to_string(TileProperty p);
std::optional<TileProperty> parse_property(std::string_view s);

using ColorProperty = std::pair<Color, TileProperty>;

// Per-episode dynamics: the color -> property mapping, the static layout of
// colored tiles, and the level's held-out pairs.
class DynamicsMap {
 public:
  DynamicsMap() = default;
  DynamicsMap(int width, int height) : width_(width), height_(height),
      tile_colors_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {}

  int width() const { return width_; }
  int height() const { return height_; }

  void set_property(Color c, TileProperty p) { mapping_[static_cast<std::size_t>(c)] = p; }
  std::optional<TileProperty> property_of(Color c) const {
    return mapping_[static_cast<std::size_t>(c)];
  }

  void set_tile(Vec2 p, std::optional<Color> c) { tile_colors_[index(p)] = c; }
  std::optional<Color> tile_color(Vec2 p) const {
    if (p.x < 0 || p.y < 0 || p.x >= width_ || p.y >= height_) return std::nullopt;
    return tile_colors_[index(p)];
  }

  // Property at a grid location; cells without a colored tile are normal.
  TileProperty property_at(Vec2 p) const;

  // Colors that appear in the tile layout, ascending by color id.
  std::vector<Color> placed_colors() const;
  // (color, property) for every placed color, ascending by color id.
  std::vector<ColorProperty> placed_pairs() const;

  std::vector<ColorProperty> held_out;

  // Same layout, every color mapped to normal. This is the world as seen by
  // an agent that ignores tile dynamics.
  DynamicsMap as_all_normal() const;

  // Throws std::invalid_argument on a layout/mapping mismatch.
  void validate() const;
  void validate_against(const GridState& grid) const;

  friend bool operator==(const DynamicsMap&, const DynamicsMap&) = default;

 private:
  std::size_t index(Vec2 p) const {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(p.x);
  }

  int width_ = 0;
  int height_ = 0;
  std::array<std::optional<TileProperty>, kNumColors> mapping_{};
  std::vector<std::optional<Color>> tile_colors_;
};

enum class TerminationReason { none, trap, success, timeout };

std::string_view to_string(TerminationReason r);

struct Transition {
  GridState next_state;
  double time_delta = 1.0;
  bool terminated = false;
  TerminationReason termination_reason = TerminationReason::none;
};

// Outcome of applying one action in place.
struct StepEffect {
  double time_delta = 1.0;
  bool trapped = false;
};

// Single-step transition. Composition order: flips, sticky, collision, trap,
// magic, time cost. Mission success and timeouts are decided by the episode.
StepEffect apply_action(GridState& state, Action action, const DynamicsMap& dynamics);

Transition resolve_action(const GridState& state, Action action, const DynamicsMap& dynamics);

}  // namespace babyaipp
