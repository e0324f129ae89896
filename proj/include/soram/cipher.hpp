#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "soram/bits.hpp"

namespace soram {

using CipherKey = std::array<std::uint8_t, 32>;

CipherKey key_from_seed(std::uint64_t seed);

struct SealedBlock {
  std::uint64_t counter = 0;
  Block body;
};

/// Counter-mode stream encryption (ChaCha20 keystream, nonce = block
/// counter). No authentication. With `enabled == false` sealing is the
/// identity but the counter still advances.
class CounterModeCipher {
 public:
  explicit CounterModeCipher(const CipherKey& key, bool enabled = true);

  SealedBlock seal(std::span<const Word> payload);
  Block open(const SealedBlock& sealed) const;

  /// XORs the keystream for `counter` into `data` in place.
  void apply(std::span<Word> data, std::uint64_t counter) const;

  std::uint64_t next_counter() const { return counter_; }
  bool enabled() const { return enabled_; }

 private:
  CipherKey key_;
  bool enabled_;
  std::uint64_t counter_ = 1;
};

}  // namespace soram
