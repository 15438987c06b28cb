// Acceptance runner: one PASS/FAIL line per top-level criterion. Exit status
// is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "babyaipp/eval.hpp"
#include "babyaipp/protocol.hpp"
#include "oracles.hpp"

using namespace babyaipp;
using namespace babyaipp::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Dynamics: six scripted episodes, one per property.

Verdict dynamics_suite() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failures.emplace_back(what);
  };
  auto base = [](TileProperty p, Vec2 tile) {
    GridState g(8, 8);
    DynamicsMap d(8, 8);
    g.agent = {2, 3, Direction::east};
    g.at(6, 6) = CellCode::object(ObjectType::ball, Color::red);
    paint(g, d, tile, Color::green);
    d.set_property(Color::green, p);
    return make_instance(g, d, go_to_red_ball());
  };

  {  // trap
    Episode ep(base(TileProperty::trap, {3, 3}));
    const auto r = ep.step(Action::forward);
    expect(r.done && r.reward == 0.0 && r.info.outcome == Outcome::trap, "trap");
  }
  {  // slippery
    Episode ep(base(TileProperty::slippery, {2, 3}));
    bool ok = true;
    for (Action a : {Action::turn_left, Action::toggle, Action::turn_right}) {
      const double before = ep.time();
      ep.step(a);
      ok &= ep.time() - before == 0.5;
    }
    ep.step(Action::forward);  // leaves the tile, still started on it
    ok &= ep.time() == 2.0;
    ep.step(Action::forward);  // plain start
    ok &= ep.time() == 3.0;
    expect(ok, "slippery");
  }
  {  // flipLeftRight
    Episode ep(base(TileProperty::flip_left_right, {2, 3}));
    ep.step(Action::turn_left);
    const bool first = ep.grid().agent.dir == Direction::south;
    ep.step(Action::turn_right);
    expect(first && ep.grid().agent.dir == Direction::east, "flipLeftRight");
  }
  {  // flipUpDown
    Episode ep(base(TileProperty::flip_up_down, {2, 3}));
    ep.step(Action::forward);
    expect(ep.grid().agent == AgentPose{1, 3, Direction::east}, "flipUpDown");
  }
  {  // sticky: enter, then leave on exactly the third action
    Episode ep(base(TileProperty::sticky, {3, 3}));
    ep.step(Action::forward);
    bool ok = ep.grid().agent.position() == Vec2{3, 3};
    ep.step(Action::forward);
    ok &= ep.grid().agent.position() == Vec2{3, 3};
    ep.step(Action::forward);
    ok &= ep.grid().agent.position() == Vec2{3, 3};
    ep.step(Action::forward);
    ok &= ep.grid().agent.position() == Vec2{4, 3};
    expect(ok, "sticky");
  }
  {  // magic
    Episode ep(base(TileProperty::magic, {2, 3}));
    ep.step(Action::turn_left);
    const bool still = ep.grid().agent.position() == Vec2{2, 3};
    ep.step(Action::turn_left);
    expect(still && ep.grid().agent.position() == Vec2{2, 4}, "magic");
  }
  Verdict v;
  v.pass = failures.empty();
  v.detail = v.pass ? "6/6 golden episodes exact" : "failed:";
  for (const auto& f : failures) v.detail += " " + f;
  return v;
}

// ---------------------------------------------------------------------------
// Partition soundness and completeness on GoToRedBall-v1.

Verdict partition() {
  const auto& level = find_level("GoToRedBall-v1");
  const std::set<ColorProperty> held(level.held_out.begin(), level.held_out.end());
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    for (const auto& pair : sample_instance(level, Mode::train, seed).dynamics.placed_pairs())
      violations += held.contains(pair) ? 1 : 0;
  }
  std::set<ColorProperty> seen;
  for (std::uint64_t seed = 0; seed < 1'000; ++seed) {
    for (const auto& pair : sample_instance(level, Mode::test, seed).dynamics.placed_pairs())
      seen.insert(pair);
  }
  return {violations == 0 && seen.size() == 6,
          "held-out pairs in 10000 train samples: " + std::to_string(violations) +
              "; pairs covered by 1000 test samples: " + std::to_string(seen.size()) + "/6"};
}

// ---------------------------------------------------------------------------
// Determinism across two processes.

std::optional<std::string> run_cli_traces(const std::string& args, const std::filesystem::path& out) {
  const std::string cmd = std::string(BABYAIPP_CLI) + " rollout " + args + " --n 100 --seed 0 --trace-out " +
                          out.string() + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) return std::nullopt;
  std::ifstream in(out, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  std::string detail;
  bool ok = true;
  for (const std::string args : {"--level GoToRedBall-v2 --mode train --policy random --policy-seed 5",
                                 "--level GoToObj --mode test --policy optimal"}) {
    const auto a = run_cli_traces(args, dir / "babyaipp_accept_a.jsonl");
    const auto b = run_cli_traces(args, dir / "babyaipp_accept_b.jsonl");
    std::size_t lines = 0;
    if (a) {
      for (char c : *a) lines += c == '\n' ? 1 : 0;
    }
    const bool same = a && b && *a == *b && lines == 100;
    ok &= same;
    detail += (detail.empty() ? "" : "; ") + std::string(same ? "identical" : "DIFFERENT") + " (" +
              std::to_string(lines) + " traces, " + std::to_string(a ? a->size() : 0) + " bytes)";
  }
  std::filesystem::remove(dir / "babyaipp_accept_a.jsonl");
  std::filesystem::remove(dir / "babyaipp_accept_b.jsonl");
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// Planner cost vs bounded-depth brute force on 6x6 levels.

Verdict optimality() {
  int matched = 0, total = 0;
  std::string mismatches;
  for (const LevelSpec& level : {small_v1(), small_all_properties()}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto inst = sample_instance(level, Mode::test, seed);
      const Plan p = plan_optimal(inst);
      const auto brute = brute_force_min_time(inst.grid, inst.mission, inst.dynamics,
                                              level.max_steps, 80);
      ++total;
      if (!brute.depth_exhausted && brute.best && *brute.best == p.total_time) {
        ++matched;
      } else if (mismatches.size() < 200) {
        mismatches += " " + level.name + "#" + std::to_string(seed);
      }
    }
  }
  return {matched == total && total == 200,
          std::to_string(matched) + "/" + std::to_string(total) + " exact matches" +
              (mismatches.empty() ? "" : "; mismatches:" + mismatches)};
}

// ---------------------------------------------------------------------------
// Witness family and dominance.

Verdict grounding() {
  int witnesses = 0;
  int dominance_ok = 0, dominance_total = 0;
  auto dominance = [&](const EnvInstance& inst) {
    ++dominance_total;
    if (planner_reward(inst, plan_optimal) >= planner_reward(inst, plan_greedy_ignorant))
      ++dominance_ok;
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Witness w = make_witness(seed);
    const bool differ = plan_optimal(w.m1).actions != plan_optimal(w.m2).actions;
    const bool greedy_worse =
        planner_reward(w.m1, plan_greedy_ignorant) < planner_reward(w.m1, plan_optimal);
    witnesses += differ && greedy_worse ? 1 : 0;
    dominance(w.m1);
    dominance(w.m2);
  }
  for (const auto& level : builtin_levels()) {
    const int n = level.mission_family == MissionFamily::put_next_local ? 30 : 100;
    for (int seed = 0; seed < n; ++seed) {
      for (Mode mode : {Mode::train, Mode::test})
        dominance(sample_instance(level, mode, static_cast<std::uint64_t>(seed)));
    }
  }
  return {witnesses >= 95 && dominance_ok == dominance_total,
          "witness instances with differing plans and strictly worse greedy: " +
              std::to_string(witnesses) + "/100; dominance " + std::to_string(dominance_ok) + "/" +
              std::to_string(dominance_total)};
}

// ---------------------------------------------------------------------------
// Evaluation protocol.

Verdict evaluation() {
  const auto& level = find_level("GoToRedBall-v1");
  const EvalStats s = evaluate(policy_factory("optimal"), level, Mode::test, 1000, 0);
  const std::vector<double> v = {1, 0, 1, 0};
  const double se = mean_and_se(v).se;
  const double hand = std::sqrt((4 * 0.25) / 3.0) / 2.0;
  const bool se_ok = std::abs(se - hand) < 1e-12;
  const auto j = nlohmann::json::parse(stats_to_json(s, "optimal"));
  bool shape = s.n == 1000;
  for (const char* k : {"succ_mean", "succ_se", "r_mean", "r_se", "nepi_mean", "nepi_se"})
    shape &= j.contains(k) && std::isfinite(j[k].get<double>());
  char line[256];
  std::snprintf(line, sizeof line, "n=%zu Succ %.3f ± %.3f, R_avg %.3f ± %.3f, N_epi %.2f ± %.2f",
                s.n, s.succ_mean, s.succ_se, s.r_mean, s.r_se, s.nepi_mean, s.nepi_se);
  std::snprintf(line + std::strlen(line), sizeof line - std::strlen(line), "; se{1,0,1,0}=%.15f",
                se);
  return {shape && se_ok && s.succ_mean == 1.0, line};
}

// ---------------------------------------------------------------------------
// Protocol round-trip over TCP.

Verdict protocol_round_trip() {
  protocol::TcpServer server;
  const auto port = server.listen("127.0.0.1", 0);
  server.start();
  int equal = 0;
  long steps = 0;
  std::string first_failure;
  {
    protocol::TcpClient client("127.0.0.1", port);
    Rng pick(99);
    const auto& levels = builtin_levels();
    for (int i = 0; i < 1000; ++i) {
      const auto& level = levels[pick.below(levels.size())];
      const Mode mode = pick.below(2) == 0 ? Mode::train : Mode::test;
      const std::uint64_t seed = pick.below(1u << 30);
      nlohmann::json req = {{"op", "reset"}, {"level", level.name}, {"mode", to_string(mode)},
                            {"seed", seed}};
      Episode local = Episode::reset(level, mode, seed);
      auto wire = nlohmann::json::parse(client.request(req.dump()));
      bool ok = protocol::decode_observation(wire["observation"].dump()) == local.observation();
      RandomPolicy policy(seed);
      while (ok && !local.terminated()) {
        const Action a = policy.next();
        const StepResult r = local.step(a);
        wire = nlohmann::json::parse(
            client.request(nlohmann::json{{"op", "step"}, {"action", static_cast<int>(a)}}.dump()));
        const Observation got = protocol::decode_observation(wire["observation"].dump());
        ok = std::memcmp(got.grid.data(), r.observation.grid.data(), got.grid.size()) == 0 &&
             got == r.observation && wire["reward"].get<double>() == r.reward &&
             wire["done"].get<bool>() == r.done;
        ++steps;
      }
      if (ok) {
        ++equal;
      } else if (first_failure.empty()) {
        first_failure = "; first mismatch: " + level.name + " seed " + std::to_string(seed);
      }
    }
    client.request(R"({"op":"close"})");
  }
  server.stop();
  return {equal == 1000, std::to_string(equal) + "/1000 episodes byte-equal over TCP (" +
                             std::to_string(steps) + " steps)" + first_failure};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"dynamics semantics suite", 1.0, dynamics_suite},
      {"partition soundness/completeness", 30.0, partition},
      {"cross-process determinism", 10.0, determinism},
      {"oracle optimality vs brute force", 300.0, optimality},
      {"grounding matters", 0.0, grounding},
      {"evaluation protocol", 0.0, evaluation},
      {"protocol round-trip", 0.0, protocol_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    const bool in_time = c.budget_s <= 0.0 || dt < c.budget_s;
    const bool pass = v.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s  %-34s %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), dt,
                c.budget_s > 0.0 ? (in_time ? " within budget" : " OVER BUDGET") : "");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
