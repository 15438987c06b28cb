// babyaipp command-line driver: level listing, scripted rollouts and policy
// comparisons, manual play, the stepping service and trace rendering.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "babyaipp/episode.hpp"
#include "babyaipp/eval.hpp"
#include "babyaipp/protocol.hpp"
#include "babyaipp/render.hpp"

namespace {

using namespace babyaipp;

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<LevelSpec> load_levels(const std::string& registry) {
  std::vector<LevelSpec> levels = builtin_levels();
  if (registry.empty()) return levels;
  for (auto& l : registry_from_json(read_file(registry))) {
    auto it = std::find_if(levels.begin(), levels.end(),
                           [&](const LevelSpec& x) { return x.name == l.name; });
    if (it != levels.end())
      *it = std::move(l);
    else
      levels.push_back(std::move(l));
  }
  return levels;
}

const LevelSpec& pick_level(const std::vector<LevelSpec>& levels, const std::string& name) {
  for (const auto& l : levels) {
    if (l.name == name) return l;
  }
  throw UsageError("unknown level: " + name + " (see `babyaipp levels`)");
}

Mode pick_mode(const std::string& s) {
  const auto m = parse_mode(s);
  if (!m) throw UsageError("mode must be train or test");
  return *m;
}

TextMode pick_text_mode(const std::string& s) {
  const auto m = parse_text_mode(s);
  if (!m) throw UsageError("text mode must be descriptive, lorem, random or shuffled");
  return *m;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonOptions {
  std::string registry;
  std::string level = "GoToRedBall-v1";
  std::string mode = "test";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--registry", o.registry, "extra level registry (JSON)");
  cmd->add_option("--level", o.level, "level name")->capture_default_str();
  cmd->add_option("--mode", o.mode, "train or test")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
}

int cmd_levels(const std::string& registry, bool as_json) {
  const auto levels = load_levels(registry);
  if (as_json) {
    std::cout << registry_to_json(levels) << "\n";
    return 0;
  }
  std::printf("%-16s %4s %5s %-11s %-5s %-7s %s\n", "name", "size", "tiles", "distractors",
              "steps", "partial", "properties");
  for (const auto& l : levels) {
    std::string props;
    for (auto p : l.allowed_properties) {
      if (!props.empty()) props += ",";
      props += to_string(p);
    }
    std::printf("%-16s %4d %5d %-11s %-5d %-7s %s\n", l.name.c_str(), l.grid_size,
                l.n_tile_types, l.distractors ? "yes" : "no", l.max_steps,
                l.partial_text ? "yes" : "no", props.c_str());
  }
  return 0;
}

struct RolloutOptions {
  CommonOptions common;
  std::string policy = "optimal";
  std::size_t n = 100;
  std::uint64_t policy_seed = 0;
  std::size_t threads = 1;
  std::string trace_out;
  std::string text_mode = "descriptive";
  bool json = false;
};

void write_traces(const std::string& path, const std::vector<EpisodeRecord>& episodes) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  for (const auto& e : episodes) out << serialize_trace(e.trace) << "\n";
}

int cmd_rollout(const RolloutOptions& o) {
  const auto levels = load_levels(o.common.registry);
  const LevelSpec& level = pick_level(levels, o.common.level);
  const Mode mode = pick_mode(o.common.mode);
  PolicyFactory factory;
  try {
    factory = policy_factory(o.policy, o.policy_seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.n == 0) throw UsageError("--n must be >= 1");
  const auto run = run_evaluation(factory, level, mode, o.n, o.common.seed,
                                  {o.threads, pick_text_mode(o.text_mode)});
  if (!o.trace_out.empty()) write_traces(o.trace_out, run.episodes);
  if (o.json) {
    std::cout << stats_to_json(run.stats, o.policy) << "\n";
  } else {
    std::printf("level %s (%s), policy %s, n = %zu\n", level.name.c_str(),
                std::string(to_string(mode)).c_str(), o.policy.c_str(), run.stats.n);
    std::printf("  Succ.  %.3f +- %.3f\n", run.stats.succ_mean, run.stats.succ_se);
    std::printf("  R_avg  %.3f +- %.3f\n", run.stats.r_mean, run.stats.r_se);
    std::printf("  N_epi  %.3f +- %.3f\n", run.stats.nepi_mean, run.stats.nepi_se);
  }
  return 0;
}

struct EvalOptionsCli {
  CommonOptions common;
  std::string policies = "optimal,greedy,random";
  std::size_t n = 100;
  std::uint64_t policy_seed = 0;
  std::size_t threads = 1;
  bool json = false;
};

int cmd_eval(const EvalOptionsCli& o) {
  const auto levels = load_levels(o.common.registry);
  const LevelSpec& level = pick_level(levels, o.common.level);
  const Mode mode = pick_mode(o.common.mode);
  const auto names = split_csv(o.policies);
  if (names.size() < 2) throw UsageError("--policies needs at least two entries");
  if (o.n == 0) throw UsageError("--n must be >= 1");
  std::vector<EvalStats> stats;
  for (const auto& name : names) {
    PolicyFactory factory;
    try {
      factory = policy_factory(name, o.policy_seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    stats.push_back(evaluate(factory, level, mode, o.n, o.common.seed, {o.threads}));
  }
  const Comparison table = compare(stats, names);
  std::cout << (o.json ? table.to_jsonl() : table.to_text());
  return 0;
}

std::optional<Action> parse_key(const std::string& key) {
  if (key == "a" || key == "left") return Action::turn_left;
  if (key == "d" || key == "right") return Action::turn_right;
  if (key == "w" || key == "forward") return Action::forward;
  if (key == "p" || key == "pickup") return Action::pickup;
  if (key == "o" || key == "drop") return Action::drop;
  if (key == "t" || key == "toggle") return Action::toggle;
  if (key == "x" || key == "done") return Action::done;
  if (key.size() == 1 && key[0] >= '0' && key[0] <= '6') return action_from_id(key[0] - '0');
  return std::nullopt;
}

void print_play_state(const Episode& ep) {
  std::cout << render_state(ep.grid(), ep.instance().dynamics);
  std::cout << "mission: " << ep.instruction_text() << "\n";
  for (const auto& s : ep.descriptions().sentences) std::cout << "  " << s << "\n";
  std::printf("time %.1f  steps %d  outcome %s\n", ep.time(), ep.steps(),
              std::string(to_string(ep.outcome())).c_str());
}

int cmd_play(const CommonOptions& o) {
  const auto levels = load_levels(o.registry);
  Episode ep = Episode::reset(pick_level(levels, o.level), pick_mode(o.mode), o.seed);
  std::cout << "keys: a=left d=right w=forward p=pickup o=drop t=toggle x=done q=quit\n";
  print_play_state(ep);
  for (std::string line; !ep.terminated() && std::cout << "> " << std::flush &&
                         std::getline(std::cin, line);) {
    if (line == "q" || line == "quit") break;
    const auto action = parse_key(line);
    if (!action) {
      std::cout << "unknown key\n";
      continue;
    }
    const auto r = ep.step(*action);
    print_play_state(ep);
    if (r.done) std::printf("episode over: %s, reward %.4f\n",
                            std::string(to_string(r.info.outcome)).c_str(), r.reward);
  }
  return 0;
}

int cmd_serve(const std::string& transport, const std::string& host, int port,
              const std::string& registry) {
  const auto levels = load_levels(registry);
  if (transport == "stdio") {
    protocol::serve_stream(std::cin, std::cout, levels);
    return 0;
  }
  if (transport != "tcp") throw UsageError("--transport must be stdio or tcp");
  protocol::TcpServer server(levels);
  const auto bound = server.listen(
      host, port < 0 ? protocol::default_port() : static_cast<std::uint16_t>(port));
  std::fprintf(stderr, "listening on %s:%u\n", host.c_str(), bound);
  server.run();
  return 0;
}

int cmd_dump_trace(const std::string& path, std::size_t index, const std::string& registry) {
  const auto levels = load_levels(registry);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  if (index >= lines.size())
    throw UsageError("trace index out of range (" + std::to_string(lines.size()) + " records)");
  const EpisodeTrace trace = parse_trace(lines[index]);
  const LevelSpec& level = pick_level(levels, trace.level);
  const EnvInstance inst = sample_instance(level, trace.mode, trace.seed);
  std::cout << "level " << trace.level << " (" << to_string(trace.mode) << "), seed "
            << trace.seed << ": " << instruction(inst.mission) << "\n";
  std::cout << render_trajectory(inst, trajectory_of(trace, level));
  std::printf("outcome %s, time %.1f, steps %d, actions:", std::string(to_string(trace.outcome)).c_str(),
              trace.time, trace.steps);
  for (int a : trace.actions) {
    const auto act = action_from_id(a);
    std::printf(" %s", act ? std::string(to_string(*act)).c_str() : "?");
  }
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BabyAI-style grid world with text-described tile dynamics"};
  app.require_subcommand(1);

  std::string levels_registry;
  bool levels_json = false;
  auto* levels_cmd = app.add_subcommand("levels", "list the level registry");
  levels_cmd->add_option("--registry", levels_registry, "extra level registry (JSON)");
  levels_cmd->add_flag("--json", levels_json, "print the registry as JSON");

  RolloutOptions rollout;
  auto* rollout_cmd = app.add_subcommand("rollout", "run a scripted policy and report Succ/R_avg/N_epi");
  add_common(rollout_cmd, rollout.common);
  rollout_cmd->add_option("--policy", rollout.policy, "optimal, greedy or random")->capture_default_str();
  rollout_cmd->add_option("--n", rollout.n, "episodes")->capture_default_str();
  rollout_cmd->add_option("--policy-seed", rollout.policy_seed, "seed of the random policy");
  rollout_cmd->add_option("--threads", rollout.threads, "worker threads");
  rollout_cmd->add_option("--trace-out", rollout.trace_out, "write one trace per line to this file");
  rollout_cmd->add_option("--text-mode", rollout.text_mode, "descriptive, lorem, random, shuffled");
  rollout_cmd->add_flag("--json", rollout.json, "machine-readable stats");

  EvalOptionsCli eval;
  auto* eval_cmd = app.add_subcommand("eval", "compare several policies on one level");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--policies", eval.policies, "comma-separated policy names")->capture_default_str();
  eval_cmd->add_option("--n", eval.n, "episodes per policy")->capture_default_str();
  eval_cmd->add_option("--policy-seed", eval.policy_seed, "seed of the random policy");
  eval_cmd->add_option("--threads", eval.threads, "worker threads");
  eval_cmd->add_flag("--json", eval.json, "one JSON record per row");

  CommonOptions play;
  auto* play_cmd = app.add_subcommand("play", "drive an episode from the keyboard");
  add_common(play_cmd, play);

  std::string transport = "stdio", host = "127.0.0.1", serve_registry;
  int port = -1;
  auto* serve_cmd = app.add_subcommand("serve", "run the stepping service");
  serve_cmd->add_option("--transport", transport, "stdio or tcp")->capture_default_str();
  serve_cmd->add_option("--host", host, "tcp bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "tcp port (default $BABYAIPP_PORT or 7341)");
  serve_cmd->add_option("--registry", serve_registry, "extra level registry (JSON)");

  std::string trace_path, dump_registry;
  std::size_t trace_index = 0;
  auto* dump_cmd = app.add_subcommand("dump-trace", "render a recorded trace as an ASCII path overlay");
  dump_cmd->add_option("--trace", trace_path, "trace file (one record per line)")->required();
  dump_cmd->add_option("--index", trace_index, "record index")->capture_default_str();
  dump_cmd->add_option("--registry", dump_registry, "extra level registry (JSON)");

  auto* vocab_cmd = app.add_subcommand("vocab", "print the standard token vocabulary, one per line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (levels_cmd->parsed()) return cmd_levels(levels_registry, levels_json);
    if (rollout_cmd->parsed()) return cmd_rollout(rollout);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (play_cmd->parsed()) return cmd_play(play);
    if (serve_cmd->parsed()) return cmd_serve(transport, host, port, serve_registry);
    if (dump_cmd->parsed()) return cmd_dump_trace(trace_path, trace_index, dump_registry);
    if (vocab_cmd->parsed()) {
      std::cout << Vocabulary::standard().to_text();
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsageError;
  } catch (const InvalidLevel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
