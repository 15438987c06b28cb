#include "babyaipp/episode.hpp"

#include <json.hpp>

#include "babyaipp/rng.hpp"

namespace babyaipp {

using json = nlohmann::ordered_json;

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::success: return "success";
    case Outcome::trap: return "trap";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (auto o : {Outcome::running, Outcome::success, Outcome::trap, Outcome::timeout}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

double success_reward(double time, double time_limit) { return 1.0 - 0.9 * (time / time_limit); }

bool timed_out(double time, double time_limit) { return time >= time_limit; }

namespace {

constexpr std::uint64_t kTextStream = 1;

DescriptionSet make_descriptions(const EnvInstance& inst, TextMode mode) {
  const std::uint64_t seed = mix_seed(inst.seed, kTextStream);
  if (mode == TextMode::descriptive) return describe(inst.dynamics, inst.level.partial_text, seed);
  return ablation_text(mode, inst.dynamics, seed);
}

}  // namespace

Episode Episode::reset(const LevelSpec& level, Mode mode, std::uint64_t seed,
                       EpisodeOptions options) {
  return Episode(sample_instance(level, mode, seed), options);
}

Episode::Episode(EnvInstance instance, EpisodeOptions options)
    : instance_(std::move(instance)),
      grid_(instance_.grid),
      descriptions_(make_descriptions(instance_, options.text_mode)),
      instruction_(babyaipp::instruction(instance_.mission)) {}

Observation Episode::observation() const {
  return {observe(grid_), descriptions_.sentences, instruction_};
}

StepResult Episode::step(Action action) {
  if (terminated())
    throw SteppingTerminatedEpisode("step called on a finished episode (" +
                                    std::string(to_string(outcome_)) + ")");
  const StepEffect effect = apply_action(grid_, action, instance_.dynamics);
  time_ += effect.time_delta;
  ++steps_;

  const double limit = instance_.level.max_steps;
  double reward = 0.0;
  if (effect.trapped) {
    outcome_ = Outcome::trap;
  } else if (mission_satisfied(instance_.mission, grid_)) {
    outcome_ = Outcome::success;
    reward = success_reward(time_, limit);
  } else if (timed_out(time_, limit)) {
    outcome_ = Outcome::timeout;
  }
  actions_.push_back(static_cast<int>(action));
  rewards_.push_back(reward);
  return {observation(), reward, terminated(), {time_, steps_, outcome_}};
}

EpisodeTrace Episode::trace() const {
  return {instance_.seed, instance_.level.name, instance_.mode, actions_, rewards_,
          outcome_,       time_,                steps_};
}

std::string serialize_trace(const EpisodeTrace& t) {
  json j;
  j["seed"] = t.seed;
  j["level"] = t.level;
  j["mode"] = to_string(t.mode);
  j["actions"] = t.actions;
  j["rewards"] = t.rewards;
  j["outcome"] = to_string(t.outcome);
  j["time"] = t.time;
  j["steps"] = t.steps;
  return j.dump();
}

EpisodeTrace parse_trace(std::string_view line) {
  try {
    const json j = json::parse(line);
    EpisodeTrace t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.level = j.at("level").get<std::string>();
    const auto mode = parse_mode(j.at("mode").get<std::string>());
    if (!mode) throw std::invalid_argument("bad mode in trace");
    t.mode = *mode;
    t.actions = j.at("actions").get<std::vector<int>>();
    t.rewards = j.at("rewards").get<std::vector<double>>();
    const auto outcome = parse_outcome(j.at("outcome").get<std::string>());
    if (!outcome) throw std::invalid_argument("bad outcome in trace");
    t.outcome = *outcome;
    t.time = j.at("time").get<double>();
    t.steps = j.at("steps").get<int>();
    return t;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace: ") + e.what());
  }
}

EpisodeTrace replay(const EpisodeTrace& trace, const LevelSpec& level) {
  Episode ep = Episode::reset(level, trace.mode, trace.seed);
  for (int a : trace.actions) {
    const auto action = action_from_id(a);
    if (!action) throw std::invalid_argument("trace contains invalid action id");
    if (ep.terminated()) break;
    ep.step(*action);
  }
  return ep.trace();
}

EpisodeTrace replay(const EpisodeTrace& trace) { return replay(trace, find_level(trace.level)); }

}  // namespace babyaipp
