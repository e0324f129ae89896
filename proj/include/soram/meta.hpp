#pragma once

#include <cstdint>
#include <utility>

#include "soram/params.hpp"

namespace soram {

enum class BlockType : std::uint8_t { Dummy = 0, Real = 1 };

struct BlockMeta {
  BlockType type = BlockType::Dummy;
  std::uint64_t addr = 0;
  std::uint64_t pos = 0;

  static BlockMeta dummy() { return {}; }
  static BlockMeta real(std::uint64_t addr, std::uint64_t pos) { return {BlockType::Real, addr, pos}; }
  bool is_real() const { return type == BlockType::Real; }
};

bool operator==(const BlockMeta& a, const BlockMeta& b);

/// Bit width of one packed metadata entry: 1 + ceil(lg N) + L.
inline unsigned meta_width(const TreeParams& p) { return 1 + p.addr_width + p.label_width; }

/// Packs (type, addr, pos) as bit 0 = type, then addr, then pos. Throws
/// ParamError when a Real entry's fields are out of range.
std::uint64_t encode_meta(const BlockMeta& meta, const TreeParams& p);

/// Dummy entries decode to BlockMeta::dummy() regardless of the other bits.
BlockMeta decode_meta(std::uint64_t bits, const TreeParams& p);

struct MetaLocation {
  std::uint64_t block = 0;   // metadata block index within the metadata region
  std::uint64_t offset = 0;  // bit offset within that block
  bool operator==(const MetaLocation&) const = default;
};

/// Breadth-first concatenation of every slot's metadata, cut into B-bit
/// blocks with no per-bucket padding.
class MetaLayout {
 public:
  explicit MetaLayout(const TreeParams& p);

  unsigned entry_bits() const { return entry_bits_; }
  std::uint64_t total_bits() const { return total_bits_; }
  std::uint64_t block_count() const { return block_count_; }

  std::uint64_t slot_bit_offset(std::uint64_t global_slot) const { return global_slot * entry_bits_; }
  MetaLocation locate(std::uint64_t bucket, std::uint32_t slot) const;

  /// Inclusive range of metadata blocks touched by a bucket's entries.
  std::pair<std::uint64_t, std::uint64_t> bucket_blocks(std::uint64_t bucket) const;

 private:
  TreeParams params_;
  unsigned entry_bits_;
  std::uint64_t total_bits_;
  std::uint64_t block_count_;
};

}  // namespace soram
