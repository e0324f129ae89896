#include "soram/cipher.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>
#include <vector>

namespace soram {

namespace {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

CipherKey key_from_seed(std::uint64_t seed) {
  ensure_sodium();
  CipherKey key{};
  std::uint8_t in[8];
  std::memcpy(in, &seed, sizeof in);
  crypto_generichash(key.data(), key.size(), in, sizeof in, nullptr, 0);
  return key;
}

CounterModeCipher::CounterModeCipher(const CipherKey& key, bool enabled) : key_(key), enabled_(enabled) {
  ensure_sodium();
}

void CounterModeCipher::apply(std::span<Word> data, std::uint64_t counter) const {
  if (!enabled_ || data.empty()) return;
  std::uint8_t nonce[crypto_stream_chacha20_NONCEBYTES];
  static_assert(sizeof nonce == sizeof counter);
  std::memcpy(nonce, &counter, sizeof nonce);
  auto* bytes = reinterpret_cast<unsigned char*>(data.data());
  crypto_stream_chacha20_xor(bytes, bytes, data.size_bytes(), nonce, key_.data());
}

SealedBlock CounterModeCipher::seal(std::span<const Word> payload) {
  SealedBlock out{counter_++, Block(payload.begin(), payload.end())};
  apply(out.body, out.counter);
  return out;
}

Block CounterModeCipher::open(const SealedBlock& sealed) const {
  Block out = sealed.body;
  apply(out, sealed.counter);
  return out;
}

}  // namespace soram
