#include <doctest.h>

#include "babyaipp/episode.hpp"
#include "babyaipp/planner.hpp"
#include "babyaipp/rng.hpp"
#include "support.hpp"

using namespace babyaipp;
using testing::paint;

namespace {

// Corridor: agent at (1,3) facing east, red ball at (6,3). Cells (2..5,3)
// get the given colors (0 = plain).
EnvInstance corridor(std::array<int, 4> tiles, TileProperty green = TileProperty::slippery,
                     int max_steps = 256) {
  GridState g(8, 8);
  DynamicsMap d(8, 8);
  g.agent = {1, 3, Direction::east};
  g.at(6, 3) = CellCode::object(ObjectType::ball, Color::red);
  for (int i = 0; i < 4; ++i) {
    if (tiles[static_cast<std::size_t>(i)] == 1) paint(g, d, {2 + i, 3}, Color::green);
  }
  d.set_property(Color::green, green);
  return testing::make_instance(g, d, testing::go_to_red_ball(), max_steps);
}

EpisodeTrace random_episode(const LevelSpec& level, Mode mode, std::uint64_t seed) {
  Episode ep = Episode::reset(level, mode, seed);
  RandomPolicy policy(mix_seed(seed, 99));
  while (!ep.terminated()) ep.step(policy.next());
  return ep.trace();
}

}  // namespace

TEST_CASE("reset is deterministic and starts at zero") {
  const auto& level = find_level("GoToObj");
  Episode a = Episode::reset(level, Mode::train, 17);
  Episode b = Episode::reset(level, Mode::train, 17);
  CHECK(a.observation() == b.observation());
  CHECK(a.time() == 0.0);
  CHECK(a.steps() == 0);
  CHECK(a.last_reward() == 0.0);
  CHECK(a.outcome() == Outcome::running);
  CHECK(a.observation().instruction == instruction(a.instance().mission));
  CHECK(a.descriptions().sentences.size() == 3);
  CHECK(Episode::reset(find_level("GoToObj-Partial"), Mode::test, 3).descriptions().sentences.size() == 2);
}

TEST_CASE("train resets never describe a held-out pair") {
  const auto& level = find_level("GoToRedBall-v1");
  std::vector<std::string> forbidden;
  for (const auto& [c, p] : level.held_out) forbidden.push_back(describe_pair(c, p));
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Episode ep = Episode::reset(level, Mode::train, seed);
    for (const auto& s : ep.descriptions().sentences) {
      CHECK(std::find(forbidden.begin(), forbidden.end(), s) == forbidden.end());
    }
  }
}

TEST_CASE("reward formula endpoints") {
  CHECK(success_reward(0.0, 256) == 1.0);
  CHECK(success_reward(256.0, 256) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(success_reward(128.0, 256) == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(timed_out(256.0, 256));
  CHECK_FALSE(timed_out(255.5, 256));
}

TEST_CASE("three normal actions and two slippery actions take 4 time units") {
  // Four forwards; the 3rd and 4th start on slippery: 1 + 1 + 0.5 + 0.5.
  Episode ep(corridor({0, 1, 1, 0}));
  StepResult r;
  for (int i = 0; i < 4; ++i) r = ep.step(Action::forward);
  CHECK(ep.time() == 3.0);
  CHECK(r.info.outcome == Outcome::success);

  // Three actions started on plain tiles, two on slippery.
  Episode ep2(corridor({1, 1, 0, 0}));
  ep2.step(Action::turn_left);
  ep2.step(Action::turn_right);
  ep2.step(Action::forward);   // plain start -> onto slippery
  ep2.step(Action::forward);   // slippery start
  r = ep2.step(Action::forward);  // slippery start
  CHECK_FALSE(r.done);
  CHECK(ep2.time() == 4.0);
  r = ep2.step(Action::forward);
  CHECK(r.done);
  CHECK(ep2.time() == 5.0);
  CHECK(r.reward == doctest::Approx(1.0 - 0.9 * 5.0 / 256.0).epsilon(1e-15));
  CHECK(ep2.steps() == 6);
}

TEST_CASE("stepping onto a trap ends the episode with zero reward after one action") {
  Episode ep(corridor({1, 0, 0, 0}, TileProperty::trap));
  const StepResult r = ep.step(Action::forward);
  CHECK(r.done);
  CHECK(r.reward == 0.0);
  CHECK(ep.outcome() == Outcome::trap);
  const EpisodeTrace t = ep.trace();
  CHECK(t.actions == std::vector<int>{2});
  CHECK(t.rewards == std::vector<double>{0.0});
  CHECK_THROWS_AS(ep.step(Action::forward), SteppingTerminatedEpisode);
}

TEST_CASE("timeout is measured on fractional time") {
  Episode ep(corridor({1, 0, 0, 0}, TileProperty::slippery, 3));
  ep.step(Action::forward);    // 1.0, now on slippery
  ep.step(Action::turn_left);  // 1.5
  ep.step(Action::turn_left);  // 2.0
  ep.step(Action::turn_left);  // 2.5
  CHECK_FALSE(ep.terminated());
  const auto r = ep.step(Action::turn_left);  // 3.0
  CHECK(r.done);
  CHECK(r.info.outcome == Outcome::timeout);
  CHECK(r.reward == 0.0);
  CHECK(ep.steps() == 5);
}

TEST_CASE("success on the last admissible time unit still pays") {
  Episode ep(corridor({0, 0, 0, 0}, TileProperty::slippery, 4));
  for (int i = 0; i < 3; ++i) ep.step(Action::forward);
  const auto r = ep.step(Action::forward);
  CHECK(r.info.outcome == Outcome::success);
  CHECK(r.reward == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("slippery path beats the same action sequence over plain tiles") {
  Episode plain(corridor({0, 0, 0, 0}));
  Episode slick(corridor({1, 1, 1, 1}));
  StepResult a, b;
  for (int i = 0; i < 4; ++i) {
    a = plain.step(Action::forward);
    b = slick.step(Action::forward);
  }
  REQUIRE(a.info.outcome == Outcome::success);
  REQUIRE(b.info.outcome == Outcome::success);
  CHECK(b.reward > a.reward);
}

TEST_CASE("reward bounds, monotone time and step budget over random episodes") {
  for (const auto& level : builtin_levels()) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Episode ep = Episode::reset(level, Mode::test, seed);
      RandomPolicy policy(seed);
      double last = 0.0;
      while (!ep.terminated()) {
        const auto r = ep.step(policy.next());
        const double dt = r.info.time - last;
        CHECK((dt == 0.5 || dt == 1.0));
        last = r.info.time;
        CHECK(r.reward >= 0.0);
        CHECK(r.reward <= 1.0);
        if (r.reward > 0.0) CHECK(r.info.outcome == Outcome::success);
      }
      CHECK(ep.steps() <= 2 * level.max_steps);
    }
  }
}

TEST_CASE("trace serialization round-trips byte-identically") {
  const EpisodeTrace t = random_episode(find_level("GoToRedBall-v2"), Mode::test, 4);
  const std::string line = serialize_trace(t);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(parse_trace(line) == t);
  CHECK(serialize_trace(parse_trace(line)) == line);
  CHECK(line.rfind("{\"seed\":4,\"level\":\"GoToRedBall-v2\",\"mode\":\"test\",\"actions\":[", 0) == 0);
  CHECK_THROWS_AS(parse_trace("{\"seed\":1}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trace("not json"), std::invalid_argument);
}

TEST_CASE("replaying 1000 random traces reproduces them") {
  const auto& levels = builtin_levels();
  Rng pick(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto& level = levels[pick.below(levels.size())];
    const Mode mode = pick.below(2) == 0 ? Mode::train : Mode::test;
    const EpisodeTrace t = random_episode(level, mode, pick.below(1'000'000));
    const EpisodeTrace again = replay(parse_trace(serialize_trace(t)));
    REQUIRE(again.outcome == t.outcome);
    REQUIRE(again == t);
  }
}

TEST_CASE("text modes change only the descriptions") {
  const auto& level = find_level("GoToRedBall-v2");
  Episode plain = Episode::reset(level, Mode::test, 8);
  Episode lorem = Episode::reset(level, Mode::test, 8, {TextMode::lorem});
  CHECK(plain.observation().grid == lorem.observation().grid);
  CHECK(plain.instruction_text() == lorem.instruction_text());
  CHECK(plain.descriptions().sentences != lorem.descriptions().sentences);
  const auto before = lorem.descriptions();
  lorem.step(Action::turn_left);
  CHECK(lorem.descriptions() == before);
}

TEST_CASE("outcome names") {
  for (auto o : {Outcome::running, Outcome::success, Outcome::trap, Outcome::timeout})
    CHECK(parse_outcome(to_string(o)) == o);
}
