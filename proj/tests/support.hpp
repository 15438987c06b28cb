#pragma once

// Helpers for building small hand-made worlds in tests.

#include <string>
#include <vector>

#include "babyaipp/episode.hpp"
#include "babyaipp/level.hpp"

namespace babyaipp::testing {

// Paints a colored tile into both the grid and the dynamics layout.
inline void paint(GridState& g, DynamicsMap& d, Vec2 p, Color c) {
  g.at(p) = CellCode::floor(c);
  d.set_tile(p, c);
}

inline LevelSpec custom_level(int size, MissionFamily family = MissionFamily::go_to_red_ball) {
  LevelSpec l;
  l.name = "Custom";
  l.grid_size = size;
  l.n_tile_types = 0;
  l.mission_family = family;
  l.max_steps = default_max_steps(family, size);
  return l;
}

inline Mission go_to_red_ball() { return {MissionFamily::go_to_red_ball, {ObjectType::ball, Color::red}, {}}; }

inline EnvInstance make_instance(GridState grid, DynamicsMap dyn, Mission mission,
                                 int max_steps = 0) {
  EnvInstance inst;
  inst.level = custom_level(grid.width(), mission.family);
  if (max_steps > 0) inst.level.max_steps = max_steps;
  inst.grid = std::move(grid);
  inst.dynamics = std::move(dyn);
  inst.mission = mission;
  inst.mode = Mode::test;
  return inst;
}

// Builds a world from rows of glyphs. '#' wall, '.' empty, 'R' red ball,
// 'K' grey key, 'X' green box, 'g'/'b'/'o' green/blue/orange tiles. The agent
// is placed separately.
inline std::pair<GridState, DynamicsMap> parse_map(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  GridState g(w, h);
  DynamicsMap d(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 p{x, y};
      switch (rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) {
        case '#': g.at(p) = CellCode::wall(); break;
        case '.': g.at(p) = CellCode::empty(); break;
        case 'R': g.at(p) = CellCode::object(ObjectType::ball, Color::red); break;
        case 'K': g.at(p) = CellCode::object(ObjectType::key, Color::grey); break;
        case 'X': g.at(p) = CellCode::object(ObjectType::box, Color::green); break;
        case 'g': paint(g, d, p, Color::green); break;
        case 'b': paint(g, d, p, Color::blue); break;
        case 'o': paint(g, d, p, Color::orange); break;
        default: break;
      }
    }
  }
  return {g, d};
}

}  // namespace babyaipp::testing
