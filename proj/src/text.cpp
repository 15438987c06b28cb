#include "babyaipp/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "babyaipp/rng.hpp"

namespace babyaipp {

std::string_view to_string(TextMode m) {
  switch (m) {
    case TextMode::descriptive: return "descriptive";
    case TextMode::lorem: return "lorem";
    case TextMode::random: return "random";
    case TextMode::shuffled: return "shuffled";
  }
  return "?";
}

std::optional<TextMode> parse_text_mode(std::string_view s) {
  for (auto m : {TextMode::descriptive, TextMode::lorem, TextMode::random, TextMode::shuffled}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(std::move(w));
  return out;
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

std::string describe_pair(Color c, TileProperty p) {
  return std::string(to_string(c)) + " tiles are " + std::string(to_string(p)) + " .";
}

DescriptionSet describe(const DynamicsMap& dynamics, bool partial, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  auto pairs = dynamics.placed_pairs();
  DescriptionSet out;
  if (partial && !pairs.empty()) {
    const auto drop = static_cast<long>(rng.below(pairs.size()));
    out.omitted.push_back(pairs[static_cast<std::size_t>(drop)]);
    pairs.erase(pairs.begin() + drop);
  }
  rng.shuffle(pairs);
  for (const auto& [c, p] : pairs) out.sentences.push_back(describe_pair(c, p));
  return out;
}

namespace {

std::string object_phrase(const ObjectDesc& o) {
  return std::string(to_string(o.color)) + " " + std::string(to_string(o.type));
}

}  // namespace

std::string instruction(const Mission& mission) {
  switch (mission.family) {
    case MissionFamily::go_to_red_ball:
    case MissionFamily::go_to_obj:
      return "go to the " + object_phrase(mission.target);
    case MissionFamily::put_next_local:
      if (!mission.next_to) throw std::invalid_argument("put-next mission without a second object");
      return "put the " + object_phrase(mission.target) + " next to the " +
             object_phrase(*mission.next_to);
  }
  return {};
}

std::optional<std::map<Color, TileProperty>> parse_descriptions(
    const std::vector<std::string>& sentences) {
  std::map<Color, TileProperty> out;
  for (const auto& s : sentences) {
    const auto w = split_words(s);
    if (w.size() != 5 || w[1] != "tiles" || w[2] != "are" || w[4] != ".") return std::nullopt;
    const auto color = parse_color(lowercase(w[0]));
    std::optional<TileProperty> prop;
    for (auto p : kDynamicProperties) {
      if (lowercase(to_string(p)) == lowercase(w[3])) prop = p;
    }
    if (!color || !prop || out.contains(*color)) return std::nullopt;
    out[*color] = *prop;
  }
  return out;
}

const std::vector<std::string>& descriptive_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w;
    for (auto c : kAllColors) w.emplace_back(to_string(c));
    w.emplace_back("tiles");
    w.emplace_back("are");
    for (auto p : kDynamicProperties) w.push_back(lowercase(to_string(p)));
    w.emplace_back(".");
    return w;
  }();
  return words;
}

const std::vector<std::string>& instruction_words() {
  static const std::vector<std::string> words = {"go", "to",  "the",  "put",
                                                 "next", "key", "ball", "box"};
  return words;
}

const std::vector<std::string>& irrelevant_words() {
  static const std::vector<std::string> words = {
      "apple",  "river",  "chair",  "window", "music",  "paper",  "cloud",  "stone",
      "garden", "pencil", "bridge", "candle", "forest", "mirror", "ladder", "silver"};
  return words;
}

namespace {

constexpr std::array<std::string_view, 32> kLoremSyllables = {
    "lo", "rem", "ip", "sum", "do", "lor", "sit", "am", "et",  "con", "sec",
    "tet", "ur", "ad", "pis", "cin", "el",  "it", "sed", "ei", "us",  "mod",
    "tem", "por", "in", "ci", "dunt", "ut", "la", "bo",  "ma", "gna"};

// Unbounded pseudo-Latin word source: 2 to 4 syllables, never a real
// vocabulary word.
std::string lorem_word(Rng& rng, const Vocabulary& vocab) {
  for (;;) {
    const int n = rng.uniform_int(2, 4);
    std::string w;
    for (int i = 0; i < n; ++i) w += kLoremSyllables[rng.below(kLoremSyllables.size())];
    if (vocab.id(w) == Vocabulary::kUnknown) return w;
  }
}

std::vector<std::size_t> sentence_lengths(const std::vector<std::string>& sentences) {
  std::vector<std::size_t> out;
  for (const auto& s : sentences) out.push_back(split_words(s).size());
  return out;
}

constexpr int kShuffleAttempts = 100;

}  // namespace

DescriptionSet ablation_text(TextMode mode, const DynamicsMap& dynamics, std::uint64_t rng_seed) {
  const DescriptionSet truth = describe(dynamics, false, rng_seed);
  if (mode == TextMode::descriptive) return truth;

  Rng rng(mix_seed(rng_seed, 7));
  const auto lengths = sentence_lengths(truth.sentences);
  DescriptionSet out;

  if (mode == TextMode::lorem || mode == TextMode::random) {
    const Vocabulary vocab = Vocabulary::standard();
    const auto& dictionary = irrelevant_words();
    for (auto len : lengths) {
      std::vector<std::string> words;
      for (std::size_t i = 0; i < len; ++i) {
        words.push_back(mode == TextMode::lorem ? lorem_word(rng, vocab)
                                                : dictionary[rng.below(dictionary.size())]);
      }
      out.sentences.push_back(join(words, 0, words.size()));
    }
    return out;
  }

  // Shuffled: permute words across the whole set, keep sentence lengths.
  std::vector<std::string> words;
  for (const auto& s : truth.sentences) {
    for (auto& w : split_words(s)) words.push_back(std::move(w));
  }
  const auto true_mapping = parse_descriptions(truth.sentences);
  for (int attempt = 0; attempt < kShuffleAttempts; ++attempt) {
    rng.shuffle(words);
    out.sentences.clear();
    std::size_t pos = 0;
    for (auto len : lengths) {
      out.sentences.push_back(join(words, pos, pos + len));
      pos += len;
    }
    if (words.empty() || parse_descriptions(out.sentences) != true_mapping) break;
  }
  return out;
}

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnknownToken));
}

Vocabulary::Vocabulary(const std::vector<std::string>& words) : Vocabulary() {
  for (const auto& w : words) add(lowercase(w));
}

Vocabulary Vocabulary::standard() {
  std::vector<std::string> words = descriptive_words();
  for (const auto& w : instruction_words()) words.push_back(w);
  return Vocabulary(words);
}

void Vocabulary::add(const std::string& token) {
  if (ids_.contains(token)) return;
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

int Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnknown : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    return tokens_[static_cast<std::size_t>(kUnknown)];
  return tokens_[static_cast<std::size_t>(id)];
}

std::string Vocabulary::to_text() const {
  std::string out;
  for (const auto& t : tokens_) out += t + "\n";
  return out;
}

Vocabulary Vocabulary::from_text(std::string_view text) {
  Vocabulary v;
  std::istringstream in{std::string(text)};
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < 2 || lines[0] != kPadToken || lines[1] != kUnknownToken)
    throw std::invalid_argument("vocabulary file must start with <pad> and <unk>");
  for (std::size_t i = 2; i < lines.size(); ++i) v.add(lines[i]);
  return v;
}

std::vector<int> tokenize(std::string_view sentence, const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const auto& w : split_words(lowercase(sentence))) ids.push_back(vocab.id(w));
  return ids;
}

std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab) {
  std::vector<std::string> words;
  for (int id : ids) words.push_back(vocab.token(id));
  return join(words, 0, words.size());
}

}  // namespace babyaipp
