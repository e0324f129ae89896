#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace soram {

using Word = std::uint64_t;

/// A fixed-width bit string stored little-endian in 64-bit words. Bits past
/// the logical width are kept zero.
using Block = std::vector<Word>;

constexpr std::size_t words_for_bits(std::uint64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

/// Smallest k with 2^k >= x; ceil_log2(1) == 0.
unsigned ceil_log2(std::uint64_t x);

/// Reads `width` (<= 64) bits starting at bit `offset`.
std::uint64_t get_bits(std::span<const Word> words, std::uint64_t offset, unsigned width);

void set_bits(std::span<Word> words, std::uint64_t offset, unsigned width, std::uint64_t value);

/// Copies `bits` bits from `src` at `src_offset` to `dst` at `dst_offset`.
void copy_bits(std::span<Word> dst, std::uint64_t dst_offset, std::span<const Word> src, std::uint64_t src_offset,
               std::uint64_t bits);

/// Clears everything above `bits` in the last word.
void mask_tail(std::span<Word> words, std::uint64_t bits);

inline std::uint64_t low_mask(unsigned width) { return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1; }

}  // namespace soram
