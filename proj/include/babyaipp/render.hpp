#pragma once

#include <string>
#include <vector>

#include "babyaipp/episode.hpp"

namespace babyaipp {

// Two characters per cell. First: terrain ('#' wall, '.' plain floor, or the
// tile property letter T S L U K M). Second: overlay (' ' nothing, '*' path,
// 'A' start, '@' final cell). Object cells show type letter + color letter.
char property_glyph(TileProperty p);

struct TrajectoryView {
  std::vector<Vec2> cells;  // start position followed by the position after every step
};

TrajectoryView trajectory_of(const EpisodeTrace& trace, const LevelSpec& level);

std::string render_trajectory(const EnvInstance& instance, const TrajectoryView& path);

// Current world with the agent drawn as an arrow (>, v, <, ^).
std::string render_state(const GridState& state, const DynamicsMap& dynamics);

}  // namespace babyaipp
