#include "babyaipp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <numeric>
#include <thread>

#include "babyaipp/rng.hpp"

namespace babyaipp {

using json = nlohmann::ordered_json;

namespace {

// Follows a plan computed at episode start; replans from the current state
// if the plan runs out before the episode ends.
class PlanningPolicy : public Policy {
 public:
  explicit PlanningPolicy(bool aware) : aware_(aware) {}

  void begin_episode(const Episode& episode, std::uint64_t) override { replan(episode); }

  Action act(const Episode& episode, const Observation&) override {
    if (next_ >= plan_.size()) replan(episode);
    if (next_ >= plan_.size()) return Action::done;
    return plan_[next_++];
  }

 private:
  void replan(const Episode& episode) {
    plan_.clear();
    next_ = 0;
    const auto& inst = episode.instance();
    const DynamicsMap model = aware_ ? inst.dynamics : inst.dynamics.as_all_normal();
    try {
      plan_ = plan(episode.grid(), inst.mission, model, inst.level.max_steps - episode.time())
                  .actions;
    } catch (const Unsolvable&) {
    }
  }

  bool aware_;
  std::vector<Action> plan_;
  std::size_t next_ = 0;
};

class UniformRandomPolicy : public Policy {
 public:
  explicit UniformRandomPolicy(std::uint64_t seed) : seed_(seed), random_(seed) {}

  void begin_episode(const Episode&, std::uint64_t episode_seed) override {
    random_ = RandomPolicy(mix_seed(seed_, episode_seed));
  }
  Action act(const Episode&, const Observation&) override { return random_.next(); }

 private:
  std::uint64_t seed_;
  RandomPolicy random_;
};

}  // namespace

PolicyFactory policy_factory(std::string_view name, std::uint64_t policy_seed) {
  if (name == "optimal") return [] { return std::make_unique<PlanningPolicy>(true); };
  if (name == "greedy") return [] { return std::make_unique<PlanningPolicy>(false); };
  if (name == "random")
    return [policy_seed] { return std::make_unique<UniformRandomPolicy>(policy_seed); };
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd / std::sqrt(n)};
}

EvalStats aggregate(std::string level, Mode mode, std::vector<EpisodeRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.seed < b.seed; });
  std::vector<double> succ, reward, steps;
  for (const auto& r : records) {
    succ.push_back(r.success ? 1.0 : 0.0);
    reward.push_back(r.reward);
    steps.push_back(static_cast<double>(r.steps));
  }
  EvalStats s;
  s.level = std::move(level);
  s.mode = mode;
  s.n = records.size();
  const auto sm = mean_and_se(succ), rm = mean_and_se(reward), nm = mean_and_se(steps);
  s.succ_mean = sm.mean;
  s.succ_se = sm.se;
  s.r_mean = rm.mean;
  s.r_se = rm.se;
  s.nepi_mean = nm.mean;
  s.nepi_se = nm.se;
  return s;
}

namespace {

EpisodeRecord run_episode(Policy& policy, const LevelSpec& level, Mode mode, std::uint64_t seed,
                          TextMode text_mode) {
  Episode ep = Episode::reset(level, mode, seed, {text_mode});
  policy.begin_episode(ep, seed);
  Observation obs = ep.observation();
  while (!ep.terminated()) obs = ep.step(policy.act(ep, obs)).observation;
  return {seed, ep.outcome() == Outcome::success, ep.last_reward(), ep.steps(), ep.trace()};
}

}  // namespace

EvalRun run_evaluation(const PolicyFactory& factory, const LevelSpec& level, Mode mode,
                       std::size_t n_episodes, std::uint64_t base_seed, EvalOptions options) {
  if (n_episodes == 0) throw std::invalid_argument("n_episodes must be >= 1");
  std::vector<EpisodeRecord> records(n_episodes);
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n_episodes);

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t worker) {
    try {
      auto policy = factory();
      for (std::size_t i = worker; i < n_episodes; i += workers) {
        records[i] = run_episode(*policy, level, mode, base_seed + i, options.text_mode);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (failure) std::rethrow_exception(failure);

  EvalRun run;
  run.stats = aggregate(level.name, mode, records);
  run.episodes = std::move(records);
  return run;
}

EvalStats evaluate(const PolicyFactory& policy, const LevelSpec& level, Mode mode,
                   std::size_t n_episodes, std::uint64_t base_seed, EvalOptions options) {
  return run_evaluation(policy, level, mode, n_episodes, base_seed, options).stats;
}

std::string stats_to_json(const EvalStats& s, std::string_view label) {
  json j;
  j["label"] = label;
  j["level"] = s.level;
  j["mode"] = to_string(s.mode);
  j["n"] = s.n;
  j["succ_mean"] = s.succ_mean;
  j["succ_se"] = s.succ_se;
  j["r_mean"] = s.r_mean;
  j["r_se"] = s.r_se;
  j["nepi_mean"] = s.nepi_mean;
  j["nepi_se"] = s.nepi_se;
  return j.dump();
}

namespace {

void assign_ranks(std::vector<ComparisonRow>& rows, std::size_t column,
                  double (*value)(const EvalStats&), bool higher_is_better) {
  std::vector<double> distinct;
  for (const auto& r : rows) distinct.push_back(value(r.stats));
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (higher_is_better) std::reverse(distinct.begin(), distinct.end());
  for (auto& r : rows) {
    const double v = value(r.stats);
    if (v == distinct[0])
      r.ranks[column] = Rank::best;
    else if (distinct.size() > 1 && v == distinct[1])
      r.ranks[column] = Rank::second;
  }
}

std::string cell(double mean, double se, Rank rank) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f +- %.3f", mean, se);
  std::string out = buf;
  out += rank == Rank::best ? " *" : rank == Rank::second ? " +" : "  ";
  return out;
}

std::string_view rank_name(Rank r) {
  switch (r) {
    case Rank::best: return "best";
    case Rank::second: return "second";
    case Rank::none: return "";
  }
  return "";
}

}  // namespace

Comparison compare(const std::vector<EvalStats>& stats, const std::vector<std::string>& labels) {
  if (stats.size() < 2) throw std::invalid_argument("compare needs at least two entries");
  if (labels.size() != stats.size()) throw std::invalid_argument("one label per entry required");
  for (const auto& s : stats) {
    if (s.n != stats[0].n || s.level != stats[0].level || s.mode != stats[0].mode)
      throw MismatchedMetrics("entries differ in level, mode or episode count");
  }
  Comparison c;
  for (std::size_t i = 0; i < stats.size(); ++i) c.rows.push_back({labels[i], stats[i], {}});
  assign_ranks(c.rows, 0, [](const EvalStats& s) { return s.succ_mean; }, true);
  assign_ranks(c.rows, 1, [](const EvalStats& s) { return s.r_mean; }, true);
  assign_ranks(c.rows, 2, [](const EvalStats& s) { return s.nepi_mean; }, false);
  return c;
}

std::string Comparison::to_text() const {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.label.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string out;
  if (!rows.empty()) {
    out += "level " + rows[0].stats.level + " (" + std::string(to_string(rows[0].stats.mode)) +
           "), n = " + std::to_string(rows[0].stats.n) + "\n";
  }
  out += pad("policy", width) + "  " + pad("Succ.", 18) + "  " + pad("R_avg", 18) + "  " +
         "N_epi\n";
  for (const auto& r : rows) {
    out += pad(r.label, width) + "  " + cell(r.stats.succ_mean, r.stats.succ_se, r.ranks[0]) +
           "  " + cell(r.stats.r_mean, r.stats.r_se, r.ranks[1]) + "  " +
           cell(r.stats.nepi_mean, r.stats.nepi_se, r.ranks[2]) + "\n";
  }
  out += "(* best, + second best; N_epi lower is better)\n";
  return out;
}

std::string Comparison::to_jsonl() const {
  std::string out;
  for (const auto& r : rows) {
    json j = json::parse(stats_to_json(r.stats, r.label));
    j["rank"] = {{"succ", rank_name(r.ranks[0])},
                 {"r", rank_name(r.ranks[1])},
                 {"nepi", rank_name(r.ranks[2])}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace babyaipp
