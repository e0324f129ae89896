#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "soram/bits.hpp"

namespace soram {

/// Seedable generator with fully specified output (mt19937_64 plus exact
/// shift/rejection sampling), so runs are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform over [0, 2^bits).
  std::uint64_t uniform_bits(unsigned bits) { return bits == 0 ? 0 : engine_() >> (64 - bits); }

  /// Uniform over [0, n), n >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

  void fill(std::span<Word> words) {
    for (auto& w : words) w = engine_();
  }

 private:
  std::mt19937_64 engine_;
};

/// Cheap counter-based filler for dummy payloads.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  void fill(std::span<Word> words) {
    for (auto& w : words) w = next();
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  SplitMix64 s(seed ^ (tag * 0xD1B54A32D192ED03ULL));
  return s.next();
}

}  // namespace soram
