#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "babyaipp/level.hpp"
#include "babyaipp/text.hpp"

namespace babyaipp {

class SteppingTerminatedEpisode : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Outcome { running, success, trap, timeout };

std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);

struct Observation {
  SymbolicGrid grid{};
  std::vector<std::string> descriptions;
  std::string instruction;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct StepInfo {
  double time = 0.0;
  int steps = 0;
  Outcome outcome = Outcome::running;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Terminal reward for finishing the mission at fractional time `time`.
double success_reward(double time, double time_limit);

// Timeout is measured on fractional time, not on the action count.
bool timed_out(double time, double time_limit);

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::string level;
  Mode mode = Mode::train;
  std::vector<int> actions;
  std::vector<double> rewards;
  Outcome outcome = Outcome::running;
  double time = 0.0;
  int steps = 0;

  friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

// One JSON object per line; field order fixed.
std::string serialize_trace(const EpisodeTrace& trace);
EpisodeTrace parse_trace(std::string_view line);

struct EpisodeOptions {
  TextMode text_mode = TextMode::descriptive;
};

class Episode {
 public:
  // Samples the instance, generates the texts. Propagates UnsatisfiableLevel.
  static Episode reset(const LevelSpec& level, Mode mode, std::uint64_t seed,
                       EpisodeOptions options = {});
  explicit Episode(EnvInstance instance, EpisodeOptions options = {});

  // Throws SteppingTerminatedEpisode once done.
  StepResult step(Action action);

  Observation observation() const;
  EpisodeTrace trace() const;

  const EnvInstance& instance() const { return instance_; }
  const GridState& grid() const { return grid_; }
  const DescriptionSet& descriptions() const { return descriptions_; }
  const std::string& instruction_text() const { return instruction_; }
  double time() const { return time_; }
  int steps() const { return steps_; }
  Outcome outcome() const { return outcome_; }
  bool terminated() const { return outcome_ != Outcome::running; }
  // Reward of the last step; 0 before the first step.
  double last_reward() const { return rewards_.empty() ? 0.0 : rewards_.back(); }

 private:
  EnvInstance instance_;
  GridState grid_;
  DescriptionSet descriptions_;
  std::string instruction_;
  double time_ = 0.0;
  int steps_ = 0;
  Outcome outcome_ = Outcome::running;
  std::vector<int> actions_;
  std::vector<double> rewards_;
};

// Re-runs reset + the recorded actions and returns the resulting trace.
EpisodeTrace replay(const EpisodeTrace& trace, const LevelSpec& level);
EpisodeTrace replay(const EpisodeTrace& trace);  // builtin levels

}  // namespace babyaipp
