#include "soram/instance.hpp"

#include "soram/cipher.hpp"

namespace soram {

OramInstance::OramInstance(const InstanceConfig& cfg) : cfg_(cfg), store_(cfg.trace_mode) {
  if (cfg_.params.construction == Construction::PathOram) {
    PathOramConfig pc;
    pc.block_count = cfg_.params.block_count;
    pc.block_bits = cfg_.params.block_bits;
    pc.bucket_capacity = cfg_.params.bucket_capacity;
    pc.height = cfg_.params.height;
    pc.map_mode = cfg_.table_mode == TableMode::Outsourced ? PositionMapMode::Recursive : PositionMapMode::InMemory;
    pc.seed = cfg_.seed;
    pc.map_bucket_capacity = cfg_.sub_oram.bucket_capacity;
    path_ = std::make_unique<PathOram>(pc, store_, "data");
  } else {
    succinct_ = std::make_unique<SuccinctOram>(SuccinctConfig{cfg_.params, cfg_.table_mode, cfg_.sub_oram, cfg_.seed},
                                               store_);
  }
  if (cfg_.encrypt) store_.enable_encryption(key_from_seed(derive_seed(cfg_.seed, 0xC1F)));
}

OramInstance::~OramInstance() = default;

void OramInstance::init(std::span<const Block> payloads) {
  if (path_) path_->init(payloads);
  else succinct_->init(payloads);
}

Block OramInstance::access(std::uint64_t addr, Op op, std::span<const Word> value) {
  if (path_) {
    store_.mark_epoch();
    return path_->access(addr, op, value);
  }
  return succinct_->access(addr, op, value);
}

std::size_t OramInstance::stash_size() const { return path_ ? path_->stash_size() : succinct_->stash_size(); }
std::size_t OramInstance::max_stash() const { return path_ ? path_->max_stash() : succinct_->max_stash(); }
AuditResult OramInstance::audit() const { return path_ ? path_->audit() : succinct_->audit(); }
Block OramInstance::peek(std::uint64_t addr) const { return path_ ? path_->peek(addr) : succinct_->peek(addr); }
RegionId OramInstance::data_region() const { return path_ ? path_->region() : succinct_->data_region(); }

LeafGeometry OramInstance::leaf_geometry() const {
  const TreeParams& p = cfg_.params;
  const RegionInfo& r = store_.region(data_region());
  LeafGeometry g;
  g.leaves = p.leaf_count();
  if (path_) {
    g.first_addr = r.base + p.internal_bucket_count() * p.bucket_capacity;
    g.leaf_slots = p.bucket_capacity;
    g.eviction_groups = 0;
  } else {
    g.first_addr = r.base + p.slot_base(p.internal_bucket_count());
    g.leaf_slots = p.leaf_capacity;
    g.eviction_groups = 1;
  }
  return g;
}

}  // namespace soram
