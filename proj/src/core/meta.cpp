#include "soram/meta.hpp"

#include "soram/bits.hpp"

namespace soram {

bool operator==(const BlockMeta& a, const BlockMeta& b) {
  if (a.type != b.type) return false;
  if (a.type == BlockType::Dummy) return true;
  return a.addr == b.addr && a.pos == b.pos;
}

std::uint64_t encode_meta(const BlockMeta& meta, const TreeParams& p) {
  if (!meta.is_real()) return 0;
  if (meta.addr >= p.block_count) throw ParamError("encode_meta: addr out of range");
  if (meta.pos >= p.leaf_count()) throw ParamError("encode_meta: pos out of range");
  return 1 | (meta.addr << 1) | (meta.pos << (1 + p.addr_width));
}

BlockMeta decode_meta(std::uint64_t bits, const TreeParams& p) {
  if ((bits & 1) == 0) return BlockMeta::dummy();
  return BlockMeta::real((bits >> 1) & low_mask(p.addr_width), (bits >> (1 + p.addr_width)) & low_mask(p.label_width));
}

MetaLayout::MetaLayout(const TreeParams& p)
    : params_(p),
      entry_bits_(meta_width(p)),
      total_bits_(p.slot_count() * entry_bits_),
      block_count_((total_bits_ + p.block_bits - 1) / p.block_bits) {}

MetaLocation MetaLayout::locate(std::uint64_t bucket, std::uint32_t slot) const {
  const std::uint64_t bit = slot_bit_offset(params_.slot_base(bucket) + slot);
  return {bit / params_.block_bits, bit % params_.block_bits};
}

std::pair<std::uint64_t, std::uint64_t> MetaLayout::bucket_blocks(std::uint64_t bucket) const {
  const std::uint64_t first_bit = slot_bit_offset(params_.slot_base(bucket));
  const std::uint64_t end_bit = first_bit + std::uint64_t{params_.capacity_of(bucket)} * entry_bits_;
  return {first_bit / params_.block_bits, (end_bit - 1) / params_.block_bits};
}

}  // namespace soram
