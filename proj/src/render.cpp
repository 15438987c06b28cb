#include "babyaipp/render.hpp"

#include <algorithm>

namespace babyaipp {

char property_glyph(TileProperty p) {
  switch (p) {
    case TileProperty::normal: return '.';
    case TileProperty::trap: return 'T';
    case TileProperty::slippery: return 'S';
    case TileProperty::flip_left_right: return 'L';
    case TileProperty::flip_up_down: return 'U';
    case TileProperty::sticky: return 'K';
    case TileProperty::magic: return 'M';
  }
  return '?';
}

namespace {

char object_glyph(ObjectType t) {
  switch (t) {
    case ObjectType::key: return 'k';
    case ObjectType::ball: return 'b';
    case ObjectType::box: return 'x';
    default: return '?';
  }
}

std::string cell_text(const CellCode& c, const DynamicsMap& dynamics, Vec2 p) {
  if (c.type == ObjectType::wall) return "##";
  if (c.is_object()) return {object_glyph(c.type), to_string(c.color).front()};
  return {property_glyph(dynamics.property_at(p)), ' '};
}

std::string legend(const DynamicsMap& dynamics) {
  std::string out = "tiles:";
  for (const auto& [c, p] : dynamics.placed_pairs()) {
    out += " ";
    out += to_string(c);
    out += "=";
    out += property_glyph(p);
    out += "(";
    out += to_string(p);
    out += ")";
  }
  return out + "\n";
}

}  // namespace

TrajectoryView trajectory_of(const EpisodeTrace& trace, const LevelSpec& level) {
  Episode ep = Episode::reset(level, trace.mode, trace.seed);
  TrajectoryView view;
  view.cells.push_back(ep.grid().agent.position());
  for (int a : trace.actions) {
    const auto action = action_from_id(a);
    if (!action || ep.terminated()) break;
    ep.step(*action);
    view.cells.push_back(ep.grid().agent.position());
  }
  return view;
}

std::string render_trajectory(const EnvInstance& instance, const TrajectoryView& path) {
  const auto& g = instance.grid;
  std::string out;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const Vec2 p{x, y};
      std::string text = cell_text(g.at(p), instance.dynamics, p);
      if (!path.cells.empty() && g.at(p).type != ObjectType::wall && !g.at(p).is_object()) {
        if (p == path.cells.back())
          text[1] = '@';
        else if (p == path.cells.front())
          text[1] = 'A';
        else if (std::find(path.cells.begin(), path.cells.end(), p) != path.cells.end())
          text[1] = '*';
      }
      out += text;
    }
    out += '\n';
  }
  return out + legend(instance.dynamics);
}

std::string render_state(const GridState& state, const DynamicsMap& dynamics) {
  std::string out;
  for (int y = 0; y < state.height(); ++y) {
    for (int x = 0; x < state.width(); ++x) {
      const Vec2 p{x, y};
      std::string text = cell_text(state.at(p), dynamics, p);
      if (p == state.agent.position()) {
        constexpr char arrows[] = {'>', 'v', '<', '^'};
        text[1] = arrows[static_cast<int>(state.agent.dir)];
      }
      out += text;
    }
    out += '\n';
  }
  out += legend(dynamics);
  if (state.carrying) {
    out += "carrying: ";
    out += to_string(state.carrying->color);
    out += " ";
    out += to_string(state.carrying->type);
    out += "\n";
  }
  return out;
}

}  // namespace babyaipp
