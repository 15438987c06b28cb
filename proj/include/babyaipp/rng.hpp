#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace babyaipp {

// SplitMix64 finalizer. Used to derive independent sub-seeds from one
// episode seed (stream 0 for layout, 1 for text, ...).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Portable deterministic generator. The standard distributions are
// implementation-defined, so bounded sampling and shuffling are done here
// on top of the (fully specified) mt19937_64 output sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  template <class Container>
  void shuffle(Container& c) {
    shuffle(std::span{c.data(), c.size()});
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace babyaipp
