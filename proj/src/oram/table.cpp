#include "soram/table.hpp"

#include <algorithm>
#include <stdexcept>

#include "soram/bits.hpp"
#include "soram/meta.hpp"
#include "soram/path_oram.hpp"

namespace soram {

std::string_view to_string(TableMode m) { return m == TableMode::InMemory ? "in-memory" : "outsourced"; }

TableMode table_mode_from_string(std::string_view s) {
  if (s == "in-memory" || s == "memory") return TableMode::InMemory;
  if (s == "outsourced") return TableMode::Outsourced;
  throw ParamError("unknown table mode '" + std::string(s) + "' (expected in-memory or outsourced)");
}

TablePlan plan_table(std::uint64_t entries, unsigned value_bits, std::uint32_t block_bits) {
  if (value_bits == 0 || value_bits > 64) throw ParamError("table entry width must be in [1, 64]");
  if (value_bits > block_bits) throw ParamError("table entry wider than a block");
  TablePlan p;
  p.entries = entries;
  p.value_bits = value_bits;
  p.per_block = block_bits / value_bits;
  p.blocks = (entries + p.per_block - 1) / p.per_block;
  return p;
}

std::vector<TreeParams> path_oram_chain(std::uint64_t blocks, std::uint32_t block_bits, const SubOramConfig& cfg) {
  std::vector<TreeParams> chain;
  std::uint64_t n = std::max<std::uint64_t>(blocks, 2);
  for (;;) {
    chain.push_back(path_oram_params(n, block_bits, cfg.bucket_capacity));
    if (!cfg.recursive) break;
    const TablePlan child = plan_table(n, chain.back().label_width, block_bits);
    if (child.blocks <= 1) break;
    n = std::max<std::uint64_t>(child.blocks, 2);
  }
  return chain;
}

std::uint64_t path_oram_tree_bits(const TreeParams& p, bool padded) {
  const std::uint64_t cell = std::uint64_t{p.block_bits} + meta_width(p);
  const std::uint64_t buckets = padded ? p.bucket_count() : 2 * p.block_count - 1;
  return buckets * p.bucket_capacity * cell;
}

void InMemoryTable::load(std::span<const std::uint64_t> values) {
  if (values.size() != values_.size()) throw std::invalid_argument("InMemoryTable::load: size mismatch");
  std::copy(values.begin(), values.end(), values_.begin());
}

std::uint64_t InMemoryTable::read(std::uint64_t index) {
  ++accesses_;
  return values_.at(index);
}

std::uint64_t InMemoryTable::exchange(std::uint64_t index, std::uint64_t value) {
  ++accesses_;
  return std::exchange(values_.at(index), value & low_mask(bits_));
}

std::uint64_t InMemoryTable::add(std::uint64_t index, std::int64_t delta) {
  ++accesses_;
  auto& v = values_.at(index);
  const auto next = static_cast<std::int64_t>(v) + delta;
  if (next < 0 || static_cast<std::uint64_t>(next) > low_mask(bits_))
    throw std::overflow_error("table entry leaves its " + std::to_string(bits_) + "-bit range");
  v = static_cast<std::uint64_t>(next);
  return v;
}

OramTable::OramTable(std::uint64_t size, unsigned value_bits, std::uint32_t block_bits, PhysicalStore& store,
                     const std::string& name, std::uint64_t seed, const SubOramConfig& cfg)
    : plan_(plan_table(size, value_bits, block_bits)) {
  PathOramConfig pc;
  pc.block_count = std::max<std::uint64_t>(plan_.blocks, 2);
  pc.block_bits = block_bits;
  pc.bucket_capacity = cfg.bucket_capacity;
  pc.map_mode = cfg.recursive ? PositionMapMode::Recursive : PositionMapMode::InMemory;
  pc.map_bucket_capacity = cfg.bucket_capacity;
  pc.seed = seed;
  oram_ = std::make_unique<PathOram>(pc, store, name);
}

OramTable::~OramTable() = default;

void OramTable::load(std::span<const std::uint64_t> values) {
  if (values.size() != plan_.entries) throw std::invalid_argument("OramTable::load: size mismatch");
  const std::size_t words = oram_->words_per_block();
  std::vector<Block> blocks(oram_->params().block_count, Block(words, 0));
  for (std::uint64_t i = 0; i < values.size(); ++i)
    set_bits(blocks[i / plan_.per_block], (i % plan_.per_block) * plan_.value_bits, plan_.value_bits, values[i]);
  oram_->init(blocks);
}

std::uint64_t OramTable::read(std::uint64_t index) {
  if (index >= plan_.entries) throw std::out_of_range("OramTable::read");
  ++accesses_;
  const Block b = oram_->access(index / plan_.per_block, Op::Read);
  return get_bits(b, (index % plan_.per_block) * plan_.value_bits, plan_.value_bits);
}

std::uint64_t OramTable::exchange(std::uint64_t index, std::uint64_t value) {
  if (index >= plan_.entries) throw std::out_of_range("OramTable::exchange");
  ++accesses_;
  const std::uint64_t offset = (index % plan_.per_block) * plan_.value_bits;
  const Block old = oram_->update(index / plan_.per_block,
                                  [&](Block& b) { set_bits(b, offset, plan_.value_bits, value); });
  return get_bits(old, offset, plan_.value_bits);
}

std::uint64_t OramTable::add(std::uint64_t index, std::int64_t delta) {
  if (index >= plan_.entries) throw std::out_of_range("OramTable::add");
  ++accesses_;
  const std::uint64_t offset = (index % plan_.per_block) * plan_.value_bits;
  std::uint64_t result = 0;
  bool overflow = false;
  oram_->update(index / plan_.per_block, [&](Block& b) {
    const auto next = static_cast<std::int64_t>(get_bits(b, offset, plan_.value_bits)) + delta;
    if (next < 0 || static_cast<std::uint64_t>(next) > low_mask(plan_.value_bits)) {
      overflow = true;
      return;
    }
    result = static_cast<std::uint64_t>(next);
    set_bits(b, offset, plan_.value_bits, result);
  });
  if (overflow) throw std::overflow_error("table entry leaves its " + std::to_string(plan_.value_bits) + "-bit range");
  return result;
}

std::uint64_t OramTable::peek(std::uint64_t index) const {
  const Block b = oram_->peek(index / plan_.per_block);
  return get_bits(b, (index % plan_.per_block) * plan_.value_bits, plan_.value_bits);
}

std::unique_ptr<PackedTable> make_table(TableMode mode, std::uint64_t size, unsigned value_bits,
                                        std::uint32_t block_bits, PhysicalStore& store, const std::string& name,
                                        std::uint64_t seed, const SubOramConfig& cfg) {
  if (mode == TableMode::InMemory) return std::make_unique<InMemoryTable>(size, value_bits);
  return std::make_unique<OramTable>(size, value_bits, block_bits, store, name, seed, cfg);
}

}  // namespace soram
