#include "soram/bits.hpp"

#include <bit>
#include <cassert>

namespace soram {

unsigned ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return 64 - static_cast<unsigned>(std::countl_zero(x - 1));
}

std::uint64_t get_bits(std::span<const Word> words, std::uint64_t offset, unsigned width) {
  assert(width <= 64);
  if (width == 0) return 0;
  const std::size_t w = offset / 64;
  const unsigned shift = offset % 64;
  std::uint64_t v = words[w] >> shift;
  if (shift + width > 64) v |= words[w + 1] << (64 - shift);
  return v & low_mask(width);
}

void set_bits(std::span<Word> words, std::uint64_t offset, unsigned width, std::uint64_t value) {
  assert(width <= 64);
  if (width == 0) return;
  value &= low_mask(width);
  const std::size_t w = offset / 64;
  const unsigned shift = offset % 64;
  const std::uint64_t mask = low_mask(width);
  words[w] = (words[w] & ~(mask << shift)) | (value << shift);
  if (shift + width > 64) {
    const unsigned spill = shift + width - 64;
    const std::uint64_t hi_mask = low_mask(spill);
    words[w + 1] = (words[w + 1] & ~hi_mask) | (value >> (64 - shift));
  }
}

void copy_bits(std::span<Word> dst, std::uint64_t dst_offset, std::span<const Word> src, std::uint64_t src_offset,
               std::uint64_t bits) {
  while (bits > 0) {
    const unsigned chunk = bits >= 64 ? 64 : static_cast<unsigned>(bits);
    set_bits(dst, dst_offset, chunk, get_bits(src, src_offset, chunk));
    dst_offset += chunk;
    src_offset += chunk;
    bits -= chunk;
  }
}

void mask_tail(std::span<Word> words, std::uint64_t bits) {
  if (words.empty()) return;
  const unsigned rem = bits % 64;
  if (rem != 0) words.back() &= low_mask(rem);
}

}  // namespace soram
