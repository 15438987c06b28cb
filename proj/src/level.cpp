#include "babyaipp/level.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>

#include "babyaipp/planner.hpp"
#include "babyaipp/rng.hpp"

namespace babyaipp {

using json = nlohmann::ordered_json;

std::string_view to_string(Mode m) { return m == Mode::train ? "train" : "test"; }

std::string_view to_string(MissionFamily f) {
  switch (f) {
    case MissionFamily::go_to_red_ball: return "GoToRedBall";
    case MissionFamily::go_to_obj: return "GoToObj";
    case MissionFamily::put_next_local: return "PutNextLocal";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "train") return Mode::train;
  if (s == "test") return Mode::test;
  return std::nullopt;
}

std::optional<MissionFamily> parse_mission_family(std::string_view s) {
  for (auto f : {MissionFamily::go_to_red_ball, MissionFamily::go_to_obj,
                 MissionFamily::put_next_local}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

bool LevelSpec::is_held_out(Color c, TileProperty p) const {
  return std::find(held_out.begin(), held_out.end(), ColorProperty{c, p}) != held_out.end();
}

std::vector<TileProperty> LevelSpec::properties_for(Color c, Mode mode) const {
  std::vector<TileProperty> out;
  for (auto p : allowed_properties) {
    if (mode == Mode::test || !is_held_out(c, p)) out.push_back(p);
  }
  return out;
}

namespace {

int mission_object_count(MissionFamily f) { return f == MissionFamily::put_next_local ? 2 : 1; }

bool contains(const std::vector<Color>& v, Color c) {
  return std::find(v.begin(), v.end(), c) != v.end();
}

bool contains(const std::vector<TileProperty>& v, TileProperty p) {
  return std::find(v.begin(), v.end(), p) != v.end();
}

}  // namespace

void LevelSpec::validate() const {
  auto fail = [this](const std::string& why) { throw InvalidLevel(name + ": " + why); };
  if (name.empty()) throw InvalidLevel("level name must not be empty");
  if (grid_size < 5) fail("grid_size must be >= 5");
  if (n_tile_types < 0 || n_tile_types > static_cast<int>(colors.size()))
    fail("n_tile_types must be within [0, |colors|]");
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if (std::find(colors.begin(), colors.begin() + static_cast<long>(i), colors[i]) !=
        colors.begin() + static_cast<long>(i))
      fail("duplicate tile color");
  }
  for (auto p : allowed_properties) {
    if (p == TileProperty::normal) fail("'normal' is not a dynamic property");
  }
  if (n_tile_types > 0 && allowed_properties.empty()) fail("no allowed properties");
  for (const auto& [c, p] : held_out) {
    if (!contains(colors, c) || !contains(allowed_properties, p))
      fail("held-out pair outside colors x allowed_properties");
  }
  for (auto c : colors) {
    if (properties_for(c, Mode::train).empty())
      fail("held-out set leaves color " + std::string(to_string(c)) + " without a property");
  }
  if (!(tile_density >= 0.0 && tile_density <= 1.0)) fail("tile_density must be in [0, 1]");
  if (max_steps <= 0) fail("max_steps must be positive");
  if (num_distractors < 0) fail("num_distractors must be >= 0");
  if (!distractors && num_distractors > 0) fail("num_distractors set but distractors disabled");
  const int interior = (grid_size - 2) * (grid_size - 2);
  const int fixed = mission_object_count(mission_family) + num_distractors + 1;
  if (fixed + n_tile_types > interior) fail("grid too small for objects, agent and tiles");
}

int default_max_steps(MissionFamily family, int grid_size) {
  const int per_cell = family == MissionFamily::put_next_local ? 8 : 4;
  return per_cell * grid_size * grid_size;
}

namespace {

LevelSpec make_level(std::string name, int n_tiles, std::vector<TileProperty> props,
                     std::vector<Color> colors,
                     std::vector<std::pair<Color, std::vector<TileProperty>>> train_allowed,
                     bool distractors, int num_distractors, bool partial, MissionFamily family) {
  LevelSpec l;
  l.name = std::move(name);
  l.grid_size = 8;
  l.n_tile_types = n_tiles;
  l.allowed_properties = std::move(props);
  l.colors = std::move(colors);
  // Held-out pairs are everything a color is not allowed to take in training.
  for (const auto& [c, allowed] : train_allowed) {
    for (auto p : l.allowed_properties) {
      if (!contains(allowed, p)) l.held_out.emplace_back(c, p);
    }
  }
  l.distractors = distractors;
  l.num_distractors = num_distractors;
  l.partial_text = partial;
  l.mission_family = family;
  l.max_steps = default_max_steps(family, l.grid_size);
  return l;
}

std::vector<LevelSpec> make_builtin_levels() {
  using P = TileProperty;
  const auto G = Color::green, B = Color::blue, O = Color::orange;
  const std::vector<P> all(kDynamicProperties.begin(), kDynamicProperties.end());
  const std::vector<P> no_trap = {P::slippery, P::flip_left_right, P::flip_up_down, P::sticky,
                                  P::magic};

  // Training-time (color -> allowed properties) tables.
  const std::vector<std::pair<Color, std::vector<P>>> three_color_train = {
      {G, {P::slippery, P::flip_left_right, P::sticky, P::magic}},
      {B, {P::trap, P::slippery, P::flip_left_right, P::flip_up_down}},
      {O, {P::trap, P::flip_up_down, P::sticky, P::magic}},
  };

  std::vector<LevelSpec> levels;
  levels.push_back(make_level("GoToRedBall-v1", 2, {P::trap, P::slippery, P::sticky}, {G, B},
                              {{G, {P::slippery, P::sticky}}, {B, {P::trap, P::sticky}}},
                              false, 0, false, MissionFamily::go_to_red_ball));
  levels.push_back(make_level("GoToRedBall-v2", 3, all, {G, B, O}, three_color_train, false, 0,
                              false, MissionFamily::go_to_red_ball));
  levels.push_back(make_level("PutNextLocal", 2, {P::trap, P::slippery, P::flip_left_right},
                              {G, B},
                              {{G, {P::slippery, P::flip_left_right}},
                               {B, {P::trap, P::flip_left_right}}},
                              true, 2, false, MissionFamily::put_next_local));
  levels.push_back(make_level("GoToObj", 3, all, {G, B, O}, three_color_train, true, 3, false,
                              MissionFamily::go_to_obj));
  levels.push_back(make_level(
      "GoToObj-Partial", 3, no_trap, {G, B, O},
      {{G, {P::slippery, P::flip_left_right, P::flip_up_down, P::magic}},
       {B, {P::flip_left_right, P::flip_up_down, P::sticky, P::magic}},
       {O, {P::slippery, P::flip_left_right, P::sticky, P::magic}}},
      true, 3, true, MissionFamily::go_to_obj));
  return levels;
}

}  // namespace

const std::vector<LevelSpec>& builtin_levels() {
  static const std::vector<LevelSpec> levels = make_builtin_levels();
  return levels;
}

const LevelSpec& find_level(std::string_view name) {
  for (const auto& l : builtin_levels()) {
    if (l.name == name) return l;
  }
  throw InvalidLevel("unknown level: " + std::string(name));
}

bool mission_satisfied(const Mission& mission, const GridState& state) {
  if (mission.family != MissionFamily::put_next_local) {
    const Vec2 front = state.agent.front();
    return state.in_bounds(front) && mission.target.matches(state.at(front));
  }
  std::optional<Vec2> a, b;
  for (int y = 0; y < state.height(); ++y) {
    for (int x = 0; x < state.width(); ++x) {
      const auto& c = state.at(x, y);
      if (mission.target.matches(c)) a = Vec2{x, y};
      else if (mission.next_to && mission.next_to->matches(c)) b = Vec2{x, y};
    }
  }
  if (!a || !b) return false;
  return std::abs(a->x - b->x) + std::abs(a->y - b->y) == 1;
}

namespace {

// Object colors follow the mission vocabulary; orange is reserved for tiles.
constexpr std::array<Color, 6> kObjectColors = {Color::red,    Color::green, Color::blue,
                                                Color::purple, Color::yellow, Color::grey};
constexpr std::array<ObjectType, 3> kObjectTypes = {ObjectType::key, ObjectType::ball,
                                                    ObjectType::box};

ObjectDesc random_object(Rng& rng) {
  return {kObjectTypes[rng.below(kObjectTypes.size())], kObjectColors[rng.below(kObjectColors.size())]};
}

ObjectDesc random_object_excluding(Rng& rng, const std::vector<ObjectDesc>& excluded) {
  for (;;) {
    const ObjectDesc d = random_object(rng);
    if (std::find(excluded.begin(), excluded.end(), d) == excluded.end()) return d;
  }
}

std::optional<EnvInstance> generate_layout(const LevelSpec& level, Mode mode, Rng& rng) {
  EnvInstance inst;
  inst.level = level;
  inst.mode = mode;
  GridState grid(level.grid_size, level.grid_size);

  std::vector<Vec2> free_cells;
  for (int y = 1; y < level.grid_size - 1; ++y) {
    for (int x = 1; x < level.grid_size - 1; ++x) free_cells.push_back({x, y});
  }
  const int interior = static_cast<int>(free_cells.size());
  rng.shuffle(free_cells);
  std::size_t next_cell = 0;

  Mission mission;
  mission.family = level.mission_family;
  switch (level.mission_family) {
    case MissionFamily::go_to_red_ball:
      mission.target = {ObjectType::ball, Color::red};
      break;
    case MissionFamily::go_to_obj:
      mission.target = random_object(rng);
      break;
    case MissionFamily::put_next_local:
      mission.target = random_object(rng);
      mission.next_to = random_object_excluding(rng, {mission.target});
      break;
  }
  std::vector<ObjectDesc> objects = {mission.target};
  if (mission.next_to) objects.push_back(*mission.next_to);
  const std::vector<ObjectDesc> mission_objects = objects;
  if (level.distractors) {
    for (int i = 0; i < level.num_distractors; ++i)
      objects.push_back(random_object_excluding(rng, mission_objects));
  }
  for (const auto& o : objects) grid.at(free_cells[next_cell++]) = o.code();

  const Vec2 start = free_cells[next_cell++];
  grid.agent = {start.x, start.y, static_cast<Direction>(rng.below(4))};

  DynamicsMap dyn(level.grid_size, level.grid_size);
  dyn.held_out = level.held_out;
  std::vector<Color> colors = level.colors;
  rng.shuffle(colors);
  colors.resize(static_cast<std::size_t>(level.n_tile_types));
  std::sort(colors.begin(), colors.end());
  for (auto c : colors) {
    const auto options = level.properties_for(c, mode);
    dyn.set_property(c, options[rng.below(options.size())]);
  }

  if (!colors.empty()) {
    const int remaining = interior - static_cast<int>(next_cell);
    int count = static_cast<int>(std::lround(level.tile_density * interior));
    count = std::clamp(count, static_cast<int>(colors.size()), remaining);
    if (count < static_cast<int>(colors.size())) return std::nullopt;
    for (int i = 0; i < count; ++i) {
      const Vec2 p = free_cells[next_cell++];
      const Color c = i < static_cast<int>(colors.size())
                          ? colors[static_cast<std::size_t>(i)]
                          : colors[rng.below(colors.size())];
      grid.at(p) = CellCode::floor(c);
      dyn.set_tile(p, c);
    }
  }

  if (mission_satisfied(mission, grid)) return std::nullopt;

  inst.grid = std::move(grid);
  inst.dynamics = std::move(dyn);
  inst.mission = mission;
  return inst;
}

}  // namespace

EnvInstance sample_instance(const LevelSpec& level, Mode mode, std::uint64_t seed) {
  level.validate();
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    auto inst = generate_layout(level, mode, rng);
    if (!inst) continue;
    inst->seed = seed;
    if (optimal_time(inst->grid, inst->mission, inst->dynamics, level.max_steps)) return *inst;
  }
  throw UnsatisfiableLevel(level.name + ": no solvable layout after " +
                           std::to_string(kMaxResamples) + " attempts (seed " +
                           std::to_string(seed) + ")");
}

namespace {

json object_json(const ObjectDesc& o) {
  return {{"type", to_string(o.type)}, {"color", to_string(o.color)}};
}

std::string cell_glyphs(const CellCode& c) {
  switch (c.type) {
    case ObjectType::wall: return "##";
    case ObjectType::empty: return "  ";
    case ObjectType::floor: return std::string("_") + to_string(c.color).front();
    case ObjectType::key: return std::string("K") + to_string(c.color).front();
    case ObjectType::ball: return std::string("B") + to_string(c.color).front();
    case ObjectType::box: return std::string("X") + to_string(c.color).front();
    default: return "??";
  }
}

}  // namespace

std::string serialize_instance(const EnvInstance& inst) {
  json j;
  j["level"] = inst.level.name;
  j["mode"] = to_string(inst.mode);
  j["seed"] = inst.seed;
  json rows = json::array();
  for (int y = 0; y < inst.grid.height(); ++y) {
    std::string row;
    for (int x = 0; x < inst.grid.width(); ++x) row += cell_glyphs(inst.grid.at(x, y));
    rows.push_back(row);
  }
  j["grid"] = rows;
  j["agent"] = {{"x", inst.grid.agent.x}, {"y", inst.grid.agent.y},
                {"dir", to_string(inst.grid.agent.dir)}};
  json mapping = json::object();
  for (const auto& [c, p] : inst.dynamics.placed_pairs())
    mapping[std::string(to_string(c))] = to_string(p);
  j["mapping"] = mapping;
  json mission = {{"family", to_string(inst.mission.family)},
                  {"target", object_json(inst.mission.target)}};
  if (inst.mission.next_to) mission["next_to"] = object_json(*inst.mission.next_to);
  j["mission"] = mission;
  return j.dump();
}

namespace {

json level_json(const LevelSpec& l) {
  json j;
  j["name"] = l.name;
  j["grid_size"] = l.grid_size;
  j["n_tile_types"] = l.n_tile_types;
  json props = json::array();
  for (auto p : l.allowed_properties) props.push_back(to_string(p));
  j["allowed_properties"] = props;
  json colors = json::array();
  for (auto c : l.colors) colors.push_back(to_string(c));
  j["colors"] = colors;
  json held = json::array();
  for (const auto& [c, p] : l.held_out) held.push_back(json::array({to_string(c), to_string(p)}));
  j["held_out"] = held;
  j["distractors"] = l.distractors;
  j["num_distractors"] = l.num_distractors;
  j["tile_density"] = l.tile_density;
  j["partial_text"] = l.partial_text;
  j["mission_family"] = to_string(l.mission_family);
  j["max_steps"] = l.max_steps;
  return j;
}

template <class T, class Parse>
T parse_or_throw(const json& j, Parse parse, const char* what) {
  const auto s = j.get<std::string>();
  auto v = parse(s);
  if (!v) throw InvalidLevel(std::string("unknown ") + what + ": " + s);
  return *v;
}

LevelSpec level_from(const json& j) {
  try {
    LevelSpec l;
    l.name = j.at("name").get<std::string>();
    l.grid_size = j.at("grid_size").get<int>();
    l.n_tile_types = j.at("n_tile_types").get<int>();
    for (const auto& p : j.at("allowed_properties"))
      l.allowed_properties.push_back(parse_or_throw<TileProperty>(p, parse_property, "property"));
    for (const auto& c : j.at("colors"))
      l.colors.push_back(parse_or_throw<Color>(c, parse_color, "color"));
    for (const auto& h : j.value("held_out", json::array())) {
      l.held_out.emplace_back(parse_or_throw<Color>(h.at(0), parse_color, "color"),
                              parse_or_throw<TileProperty>(h.at(1), parse_property, "property"));
    }
    l.distractors = j.value("distractors", false);
    l.num_distractors = j.value("num_distractors", 0);
    l.tile_density = j.value("tile_density", 0.3);
    l.partial_text = j.value("partial_text", false);
    l.mission_family = parse_or_throw<MissionFamily>(j.at("mission_family"),
                                                     parse_mission_family, "mission family");
    l.max_steps = j.value("max_steps", default_max_steps(l.mission_family, l.grid_size));
    l.validate();
    return l;
  } catch (const json::exception& e) {
    throw InvalidLevel(std::string("malformed level config: ") + e.what());
  }
}

}  // namespace

std::string level_to_json(const LevelSpec& level) { return level_json(level).dump(2); }

LevelSpec level_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidLevel(std::string("malformed level config: ") + e.what());
  }
  return level_from(j);
}

std::string registry_to_json(const std::vector<LevelSpec>& levels) {
  json arr = json::array();
  for (const auto& l : levels) arr.push_back(level_json(l));
  json j;
  j["levels"] = arr;
  return j.dump(2);
}

std::vector<LevelSpec> registry_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidLevel(std::string("malformed registry: ") + e.what());
  }
  if (!j.contains("levels") || !j["levels"].is_array())
    throw InvalidLevel("registry must contain a 'levels' array");
  std::vector<LevelSpec> out;
  for (const auto& l : j["levels"]) out.push_back(level_from(l));
  return out;
}

}  // namespace babyaipp
