#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "babyaipp/episode.hpp"
#include "babyaipp/planner.hpp"

namespace babyaipp {

class MismatchedMetrics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A policy drives one episode at a time. Scripted policies may read the
// privileged instance through the episode.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode(const Episode& episode, std::uint64_t episode_seed) = 0;
  virtual Action act(const Episode& episode, const Observation& observation) = 0;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// "optimal", "greedy" or "random". Throws std::invalid_argument otherwise.
PolicyFactory policy_factory(std::string_view name, std::uint64_t policy_seed = 0);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  bool success = false;
  double reward = 0.0;
  int steps = 0;
  EpisodeTrace trace;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and standard error sd/sqrt(n), sd with the n-1 denominator.
// se is 0 for n == 1.
MeanSe mean_and_se(std::span<const double> values);

struct EvalStats {
  std::string level;
  Mode mode = Mode::train;
  std::size_t n = 0;
  double succ_mean = 0.0, succ_se = 0.0;
  double r_mean = 0.0, r_se = 0.0;
  double nepi_mean = 0.0, nepi_se = 0.0;
};

// Records are ordered by seed before summing, so the result does not depend
// on the order episodes finished in.
EvalStats aggregate(std::string level, Mode mode, std::vector<EpisodeRecord> records);

struct EvalOptions {
  std::size_t threads = 1;
  TextMode text_mode = TextMode::descriptive;
};

struct EvalRun {
  EvalStats stats;
  std::vector<EpisodeRecord> episodes;  // ascending seed
};

// Episodes use seeds base_seed .. base_seed + n - 1.
EvalRun run_evaluation(const PolicyFactory& policy, const LevelSpec& level, Mode mode,
                       std::size_t n_episodes, std::uint64_t base_seed, EvalOptions options = {});

EvalStats evaluate(const PolicyFactory& policy, const LevelSpec& level, Mode mode,
                   std::size_t n_episodes, std::uint64_t base_seed, EvalOptions options = {});

std::string stats_to_json(const EvalStats& stats, std::string_view label);

enum class Rank { none, best, second };

struct ComparisonRow {
  std::string label;
  EvalStats stats;
  std::array<Rank, 3> ranks{};  // Succ, R_avg, N_epi
};

struct Comparison {
  std::vector<ComparisonRow> rows;

  std::string to_text() const;
  std::string to_jsonl() const;
};

// Higher is better for Succ and R_avg, lower for N_epi. Requires >= 2 rows
// over the same level, mode and episode count.
Comparison compare(const std::vector<EvalStats>& stats, const std::vector<std::string>& labels);

}  // namespace babyaipp
