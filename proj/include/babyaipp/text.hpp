#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "babyaipp/dynamics.hpp"
#include "babyaipp/level.hpp"

namespace babyaipp {

struct DescriptionSet {
  std::vector<std::string> sentences;
  std::vector<ColorProperty> omitted;

  friend bool operator==(const DescriptionSet&, const DescriptionSet&) = default;
};

enum class TextMode { descriptive, lorem, random, shuffled };

std::string_view to_string(TextMode m);
std::optional<TextMode> parse_text_mode(std::string_view s);

// "<color> tiles are <property> ."
std::string describe_pair(Color c, TileProperty p);

// One sentence per placed color in a seeded random order; partial mode drops
// exactly one uniformly chosen pair.
DescriptionSet describe(const DynamicsMap& dynamics, bool partial, std::uint64_t rng_seed);

std::string instruction(const Mission& mission);

// Nonsense replacements for the descriptions. Sentence count follows the
// full description of `dynamics`.
DescriptionSet ablation_text(TextMode mode, const DynamicsMap& dynamics, std::uint64_t rng_seed);

// Inverse of the description template. Returns nullopt if any sentence does
// not parse or a color is described twice.
std::optional<std::map<Color, TileProperty>> parse_descriptions(
    const std::vector<std::string>& sentences);

// Words used by the description template (colors, properties, glue, ".").
const std::vector<std::string>& descriptive_words();
// Words used by mission instructions.
const std::vector<std::string>& instruction_words();
// Fixed dictionary of irrelevant words, the same size as descriptive_words().
const std::vector<std::string>& irrelevant_words();

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnknown = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnknownToken = "<unk>";

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& words);

  // Descriptive plus instruction words, ids in that order after the specials.
  static Vocabulary standard();

  int id(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }

  // One token per line, id = line number.
  std::string to_text() const;
  static Vocabulary from_text(std::string_view text);

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Lowercases, splits on whitespace, maps unknown words to kUnknown.
std::vector<int> tokenize(std::string_view sentence, const Vocabulary& vocab);
std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab);

}  // namespace babyaipp
