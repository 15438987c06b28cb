#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "babyaipp/text.hpp"
#include "support.hpp"

using namespace babyaipp;
using P = TileProperty;

namespace {

DynamicsMap two_colors() {
  DynamicsMap d(8, 8);
  d.set_tile({2, 2}, Color::blue);
  d.set_tile({3, 3}, Color::green);
  d.set_property(Color::blue, P::slippery);
  d.set_property(Color::green, P::sticky);
  return d;
}

DynamicsMap three_colors() {
  DynamicsMap d = two_colors();
  d.set_tile({4, 4}, Color::orange);
  d.set_property(Color::orange, P::flip_up_down);
  return d;
}

std::multiset<std::string> word_multiset(const std::vector<std::string>& sentences) {
  std::multiset<std::string> out;
  for (const auto& s : sentences) {
    std::istringstream in(s);
    for (std::string w; in >> w;) out.insert(w);
  }
  return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("full descriptions apply the template once per placed color") {
  const auto set = describe(two_colors(), false, 1);
  CHECK(sorted(set.sentences) ==
        std::vector<std::string>{"blue tiles are slippery .", "green tiles are sticky ."});
  CHECK(set.omitted.empty());
  CHECK(describe_pair(Color::orange, P::flip_left_right) == "orange tiles are flipLeftRight .");
}

TEST_CASE("partial descriptions drop exactly one pair") {
  std::set<ColorProperty> dropped;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto set = describe(three_colors(), true, seed);
    REQUIRE(set.sentences.size() == 2);
    REQUIRE(set.omitted.size() == 1);
    const auto parsed = parse_descriptions(set.sentences);
    REQUIRE(parsed.has_value());
    CHECK_FALSE(parsed->contains(set.omitted[0].first));
    dropped.insert(set.omitted[0]);
  }
  CHECK(dropped.size() == 3);
}

TEST_CASE("sentence order varies with the seed and is reproducible") {
  const auto d = three_colors();
  CHECK(describe(d, false, 42) == describe(d, false, 42));
  std::set<std::vector<std::string>> orders;
  for (std::uint64_t seed = 0; seed < 100; ++seed) orders.insert(describe(d, false, seed).sentences);
  CHECK(orders.size() == 6);
}

TEST_CASE("descriptions reconstruct the mapping") {
  const auto d = three_colors();
  const auto parsed = parse_descriptions(describe(d, false, 5).sentences);
  REQUIRE(parsed.has_value());
  for (const auto& [c, p] : d.placed_pairs()) CHECK(parsed->at(c) == p);
  CHECK(parsed->size() == 3);
  CHECK_FALSE(parse_descriptions({"blue tiles are sticky .", "blue tiles are trap ."}));
  CHECK_FALSE(parse_descriptions({"blue tiles were sticky ."}));
}

TEST_CASE("instructions") {
  CHECK(instruction(testing::go_to_red_ball()) == "go to the red ball");
  CHECK(instruction({MissionFamily::go_to_obj, {ObjectType::key, Color::grey}, {}}) ==
        "go to the grey key");
  CHECK(instruction({MissionFamily::put_next_local,
                     {ObjectType::key, Color::grey},
                     ObjectDesc{ObjectType::box, Color::green}}) ==
        "put the grey key next to the green box");
}

TEST_CASE("shuffled ablation keeps the words and breaks the pairing") {
  const auto d = two_colors();
  const auto truth = describe(d, false, 3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto shuffled = ablation_text(TextMode::shuffled, d, seed);
    CHECK(word_multiset(shuffled.sentences) == word_multiset(truth.sentences));
    CHECK(shuffled.sentences.size() == truth.sentences.size());
    CHECK(sorted(shuffled.sentences) != sorted(truth.sentences));
    CHECK(parse_descriptions(shuffled.sentences) != parse_descriptions(truth.sentences));
  }
}

TEST_CASE("random ablation draws from a dictionary the size of the real vocabulary") {
  CHECK(irrelevant_words().size() == descriptive_words().size());
  const std::set<std::string> dict(irrelevant_words().begin(), irrelevant_words().end());
  CHECK(dict.size() == irrelevant_words().size());
  const Vocabulary vocab = Vocabulary::standard();
  for (const auto& w : dict) CHECK(vocab.id(w) == Vocabulary::kUnknown);
  const auto text = ablation_text(TextMode::random, three_colors(), 9);
  CHECK(text.sentences.size() == 3);
  for (const auto& w : word_multiset(text.sentences)) CHECK(dict.contains(w));
  for (const auto& s : text.sentences) CHECK(tokenize(s, vocab).size() == 5);
}

TEST_CASE("lorem ablation") {
  const auto d = two_colors();
  const auto a = ablation_text(TextMode::lorem, d, 1);
  const auto b = ablation_text(TextMode::lorem, d, 2);
  CHECK(a.sentences.size() == 2);
  CHECK(a.sentences != b.sentences);
  CHECK(a == ablation_text(TextMode::lorem, d, 1));
  const Vocabulary vocab = Vocabulary::standard();
  for (const auto& s : a.sentences) {
    const auto ids = tokenize(s, vocab);
    CHECK(ids.size() == 5);
    for (int id : ids) CHECK(id == Vocabulary::kUnknown);
  }
}

TEST_CASE("tokenize") {
  const Vocabulary vocab = Vocabulary::standard();
  const auto ids = tokenize("blue tiles are slippery .", vocab);
  CHECK(ids.size() == 5);
  for (int id : ids) CHECK(id != Vocabulary::kUnknown);
  CHECK(tokenize("", vocab).empty());
  CHECK(tokenize("Blue TILES are flipLeftRight .", vocab) ==
        tokenize("blue tiles are flipleftright .", vocab));
  CHECK(detokenize(ids, vocab) == "blue tiles are slippery .");
  CHECK(detokenize(tokenize("go to the zebra", vocab), vocab) == "go to the <unk>");
}

TEST_CASE("vocabulary layout and file round-trip") {
  const Vocabulary v = Vocabulary::standard();
  CHECK(v.token(0) == "<pad>");
  CHECK(v.token(1) == "<unk>");
  CHECK(v.size() == 2 + descriptive_words().size() + instruction_words().size());
  CHECK(v.id("red") == 2);
  const Vocabulary back = Vocabulary::from_text(v.to_text());
  REQUIRE(back.size() == v.size());
  for (int i = 0; i < static_cast<int>(v.size()); ++i) CHECK(back.token(i) == v.token(i));
  CHECK_THROWS_AS(Vocabulary::from_text("red\nblue\n"), std::invalid_argument);
}

TEST_CASE("every generated text tokenizes without unknowns") {
  const Vocabulary v = Vocabulary::standard();
  for (const auto& level : builtin_levels()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = sample_instance(level, Mode::test, seed);
      for (const auto& s : describe(inst.dynamics, level.partial_text, seed).sentences) {
        for (int id : tokenize(s, v)) CHECK(id != Vocabulary::kUnknown);
      }
      for (int id : tokenize(instruction(inst.mission), v)) CHECK(id != Vocabulary::kUnknown);
    }
  }
}

TEST_CASE("text mode names") {
  for (auto m : {TextMode::descriptive, TextMode::lorem, TextMode::random, TextMode::shuffled})
    CHECK(parse_text_mode(to_string(m)) == m);
  CHECK_FALSE(parse_text_mode("poetry").has_value());
}
