#include "babyaipp/planner.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

namespace babyaipp {

namespace {

// Costs are kept in half time units so comparisons are exact.
using Cost = std::int64_t;
constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;
constexpr int kGoal = -1;
constexpr std::size_t kMaxNodes = 250'000;

Cost to_halves(double time) { return static_cast<Cost>(std::llround(time * 2.0)); }

struct Edge {
  Action action;
  int to;  // node index or kGoal
  Cost cost;
};

struct SearchGraph {
  std::unordered_map<GridState, int, GridStateHash> index;
  std::vector<const GridState*> nodes;  // keys of `index`; node-based map keeps them stable
  std::vector<Cost> g;
  std::vector<std::vector<Edge>> edges;  // only for expanded nodes
  Cost best = kInf;
  bool exhausted_budget = false;

  int intern(const GridState& s) {
    auto [it, inserted] = index.try_emplace(s, static_cast<int>(nodes.size()));
    if (inserted) {
      nodes.push_back(&it->first);
      g.push_back(kInf);
      edges.emplace_back();
    }
    return it->second;
  }
};

// Forward uniform-cost search from `start`. Successor states that satisfy the
// mission collapse into a single virtual goal node. A non-goal state whose
// time reaches the limit is a timeout and is pruned; trap transitions too.
SearchGraph forward_search(const GridState& start, const Mission& mission,
                           const DynamicsMap& dynamics, Cost limit, bool record_edges) {
  SearchGraph graph;
  using Entry = std::pair<Cost, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const int root = graph.intern(start);
  graph.g[static_cast<std::size_t>(root)] = 0;
  open.emplace(0, root);
  std::vector<bool> closed;

  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    const auto uu = static_cast<std::size_t>(u);
    if (closed.size() <= uu) closed.resize(graph.nodes.size(), false);
    if (closed[uu] || d > graph.g[uu]) continue;
    closed[uu] = true;
    if (d >= graph.best) break;

    for (int a = 0; a < kNumActions; ++a) {
      GridState next = *graph.nodes[uu];
      const StepEffect effect = apply_action(next, static_cast<Action>(a), dynamics);
      if (effect.trapped) continue;
      const Cost step = to_halves(effect.time_delta);
      const Cost nd = d + step;
      if (mission_satisfied(mission, next)) {
        if (nd > limit) continue;
        graph.best = std::min(graph.best, nd);
        if (record_edges) graph.edges[uu].push_back({static_cast<Action>(a), kGoal, step});
        continue;
      }
      if (nd >= limit) continue;
      if (graph.nodes.size() >= kMaxNodes && !graph.index.contains(next)) {
        graph.exhausted_budget = true;
        continue;
      }
      const int v = graph.intern(next);
      const auto vv = static_cast<std::size_t>(v);
      if (record_edges) graph.edges[uu].push_back({static_cast<Action>(a), v, step});
      if (nd < graph.g[vv]) {
        graph.g[vv] = nd;
        open.emplace(nd, v);
      }
    }
  }
  return graph;
}

// Cost-to-goal over the recorded subgraph (reverse uniform-cost search).
std::vector<Cost> cost_to_goal(const SearchGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::vector<std::pair<int, Cost>>> reverse(n);
  std::vector<Cost> h(n, kInf);
  using Entry = std::pair<Cost, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& e : graph.edges[u]) {
      if (e.to == kGoal) {
        if (e.cost < h[u]) {
          h[u] = e.cost;
          open.emplace(e.cost, static_cast<int>(u));
        }
      } else {
        reverse[static_cast<std::size_t>(e.to)].emplace_back(static_cast<int>(u), e.cost);
      }
    }
  }
  while (!open.empty()) {
    const auto [d, v] = open.top();
    open.pop();
    if (d > h[static_cast<std::size_t>(v)]) continue;
    for (const auto& [u, c] : reverse[static_cast<std::size_t>(v)]) {
      const auto uu = static_cast<std::size_t>(u);
      if (d + c < h[uu]) {
        h[uu] = d + c;
        open.emplace(h[uu], u);
      }
    }
  }
  return h;
}

// Cells the agent could ever occupy if objects were no obstacle: flood fill
// over walkable-or-object cells that are not traps. Every tile effect moves
// the agent by one cell, so this over-approximates true reachability.
std::vector<bool> relaxed_reach(const GridState& start, const DynamicsMap& dynamics) {
  const int w = start.width(), h = start.height();
  std::vector<bool> seen(static_cast<std::size_t>(w * h), false);
  std::vector<Vec2> stack = {start.agent.position()};
  seen[static_cast<std::size_t>(start.agent.y * w + start.agent.x)] = true;
  while (!stack.empty()) {
    const Vec2 p = stack.back();
    stack.pop_back();
    for (auto d : {Direction::east, Direction::south, Direction::west, Direction::north}) {
      const Vec2 v = direction_vector(d);
      const Vec2 q{p.x + v.x, p.y + v.y};
      if (!start.in_bounds(q)) continue;
      const auto idx = static_cast<std::size_t>(q.y * w + q.x);
      const auto& c = start.at(q);
      if (seen[idx] || !(c.walkable() || c.is_object())) continue;
      if (dynamics.property_at(q) == TileProperty::trap) continue;
      seen[idx] = true;
      stack.push_back(q);
    }
  }
  return seen;
}

// Sound quick rejection: the mission needs the agent next to every mission
// object at some point.
bool obviously_unsolvable(const GridState& start, const Mission& mission,
                          const DynamicsMap& dynamics) {
  const auto reach = relaxed_reach(start, dynamics);
  auto touchable = [&](const ObjectDesc& o) {
    for (int y = 0; y < start.height(); ++y) {
      for (int x = 0; x < start.width(); ++x) {
        if (!o.matches(start.at(x, y))) continue;
        for (auto d : {Direction::east, Direction::south, Direction::west, Direction::north}) {
          const Vec2 v = direction_vector(d);
          const Vec2 q{x + v.x, y + v.y};
          if (start.in_bounds(q) && reach[static_cast<std::size_t>(q.y * start.width() + q.x)])
            return true;
        }
      }
    }
    return start.carrying && o.matches(*start.carrying);
  };
  if (!touchable(mission.target)) return true;
  return mission.next_to && !touchable(*mission.next_to);
}

}  // namespace

std::optional<double> optimal_time(const GridState& start, const Mission& mission,
                                   const DynamicsMap& dynamics, double time_limit) {
  if (obviously_unsolvable(start, mission, dynamics)) return std::nullopt;
  const auto graph = forward_search(start, mission, dynamics, to_halves(time_limit), false);
  if (graph.best == kInf) return std::nullopt;
  return static_cast<double>(graph.best) / 2.0;
}

Plan plan(const GridState& start, const Mission& mission, const DynamicsMap& dynamics,
          double time_limit) {
  if (obviously_unsolvable(start, mission, dynamics))
    throw Unsolvable("mission objects are cut off from the agent");
  const auto graph = forward_search(start, mission, dynamics, to_halves(time_limit), true);
  if (graph.best == kInf) {
    throw Unsolvable(graph.exhausted_budget ? "search budget exhausted without a plan"
                                            : "no plan completes the mission within the horizon");
  }
  const auto h = cost_to_goal(graph);

  Plan out;
  out.total_time = static_cast<double>(graph.best) / 2.0;
  int u = 0;
  for (;;) {
    const auto uu = static_cast<std::size_t>(u);
    const Edge* chosen = nullptr;
    // Edges are recorded in ascending action order, so the first edge on an
    // optimal continuation gives the lexicographically smallest plan.
    for (const auto& e : graph.edges[uu]) {
      const Cost rest = e.to == kGoal ? 0 : h[static_cast<std::size_t>(e.to)];
      if (rest != kInf && e.cost + rest == h[uu]) {
        chosen = &e;
        break;
      }
    }
    if (chosen == nullptr) throw Unsolvable("internal: optimal path reconstruction failed");
    out.actions.push_back(chosen->action);
    if (chosen->to == kGoal) break;
    u = chosen->to;
  }
  return out;
}

Plan plan_optimal(const EnvInstance& instance) {
  return plan(instance.grid, instance.mission, instance.dynamics, instance.level.max_steps);
}

Plan plan_greedy_ignorant(const EnvInstance& instance) {
  return plan(instance.grid, instance.mission, instance.dynamics.as_all_normal(),
              instance.level.max_steps);
}

}  // namespace babyaipp
