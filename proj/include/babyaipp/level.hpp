#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "babyaipp/dynamics.hpp"
#include "babyaipp/grid.hpp"

namespace babyaipp {

class UnsatisfiableLevel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidLevel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { train, test };
enum class MissionFamily { go_to_red_ball, go_to_obj, put_next_local };

std::string_view to_string(Mode m);
std::string_view to_string(MissionFamily f);
std::optional<Mode> parse_mode(std::string_view s);
std::optional<MissionFamily> parse_mission_family(std::string_view s);

struct LevelSpec {
  std::string name;
  int grid_size = 8;
  int n_tile_types = 2;
  std::vector<TileProperty> allowed_properties;
  std::vector<Color> colors;
  std::vector<ColorProperty> held_out;
  bool distractors = false;
  int num_distractors = 0;
  double tile_density = 0.3;
  bool partial_text = false;
  MissionFamily mission_family = MissionFamily::go_to_red_ball;
  int max_steps = 256;

  bool is_held_out(Color c, TileProperty p) const;
  // Properties a color may take in the given mode.
  std::vector<TileProperty> properties_for(Color c, Mode mode) const;

  // Throws InvalidLevel.
  void validate() const;

  friend bool operator==(const LevelSpec&, const LevelSpec&) = default;
};

// Horizon convention: 4*size^2 for go-to missions, 8*size^2 for put-next.
int default_max_steps(MissionFamily family, int grid_size);

const std::vector<LevelSpec>& builtin_levels();
// Throws InvalidLevel for unknown names.
const LevelSpec& find_level(std::string_view name);

struct ObjectDesc {
  ObjectType type = ObjectType::ball;
  Color color = Color::red;

  CellCode code() const { return CellCode::object(type, color); }
  bool matches(const CellCode& c) const { return c.type == type && c.color == color; }
  friend bool operator==(const ObjectDesc&, const ObjectDesc&) = default;
};

// GoTo missions use `target`; PutNext moves `target` next to `next_to`.
struct Mission {
  MissionFamily family = MissionFamily::go_to_red_ball;
  ObjectDesc target;
  std::optional<ObjectDesc> next_to;

  friend bool operator==(const Mission&, const Mission&) = default;
};

struct EnvInstance {
  GridState grid;
  DynamicsMap dynamics;
  Mission mission;
  LevelSpec level;
  Mode mode = Mode::train;
  std::uint64_t seed = 0;
};

bool mission_satisfied(const Mission& mission, const GridState& state);
inline bool mission_satisfied(const EnvInstance& instance, const GridState& state) {
  return mission_satisfied(instance.mission, state);
}

inline constexpr int kMaxResamples = 100;

// Deterministic in (level, mode, seed). Throws UnsatisfiableLevel after
// kMaxResamples consecutive unsolvable layouts, InvalidLevel for bad specs.
EnvInstance sample_instance(const LevelSpec& level, Mode mode, std::uint64_t seed);

// Canonical text form of an instance (used for determinism checks and dumps).
std::string serialize_instance(const EnvInstance& instance);

// Level registry as JSON: {"levels": [ {...}, ... ]}.
std::string level_to_json(const LevelSpec& level);
LevelSpec level_from_json(std::string_view text);
std::string registry_to_json(const std::vector<LevelSpec>& levels);
std::vector<LevelSpec> registry_from_json(std::string_view text);

}  // namespace babyaipp
