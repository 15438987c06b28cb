#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "babyaipp/level.hpp"
#include "babyaipp/rng.hpp"

namespace babyaipp {

class Unsolvable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Plan {
  std::vector<Action> actions;
  double total_time = 0.0;
};

// Minimum-time action sequence completing the mission under the true
// dynamics. Uniform-cost search over exact world states with apply_action as
// the successor function; trap transitions are dead ends. Among equal-time
// plans the lexicographically smallest action-id sequence is returned.
// Throws Unsolvable.
Plan plan_optimal(const EnvInstance& instance);

// Same search with every tile treated as normal.
Plan plan_greedy_ignorant(const EnvInstance& instance);

// Minimum completion time without building the plan; nullopt if none.
std::optional<double> optimal_time(const GridState& start, const Mission& mission,
                                   const DynamicsMap& dynamics, double time_limit);

Plan plan(const GridState& start, const Mission& mission, const DynamicsMap& dynamics,
          double time_limit);

// Uniform over the seven actions; deterministic per seed.
class RandomPolicy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Action next() { return static_cast<Action>(rng_.below(kNumActions)); }

 private:
  Rng rng_;
};

}  // namespace babyaipp
