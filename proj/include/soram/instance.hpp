#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>

#include "soram/block_store.hpp"
#include "soram/params.hpp"
#include "soram/path_oram.hpp"
#include "soram/succinct_oram.hpp"
#include "soram/table.hpp"

namespace soram {

struct InstanceConfig {
  TreeParams params;
  TableMode table_mode = TableMode::InMemory;
  SubOramConfig sub_oram;
  std::uint64_t seed = 0;
  TraceMode trace_mode = TraceMode::CountersOnly;
  /// Seal every cell with a key derived from the seed.
  bool encrypt = false;
};

/// Where the leaf buckets of the data tree live in the server address space.
struct LeafGeometry {
  std::uint64_t first_addr = 0;  // global address of slot 0 of leaf 0
  std::uint32_t leaf_slots = 0;  // M (Z for Path ORAM)
  std::uint64_t leaves = 0;
  /// Leaf groups read by eviction after the read paths (0 for Path ORAM).
  unsigned eviction_groups = 0;
};

/// One ORAM of any construction together with its server.
class OramInstance {
 public:
  explicit OramInstance(const InstanceConfig& cfg);
  ~OramInstance();

  OramInstance(const OramInstance&) = delete;
  OramInstance& operator=(const OramInstance&) = delete;

  void init(std::span<const Block> payloads = {});
  Block access(std::uint64_t addr, Op op, std::span<const Word> value = {});

  const TreeParams& params() const { return cfg_.params; }
  const InstanceConfig& config() const { return cfg_; }
  PhysicalStore& store() { return store_; }
  const PhysicalStore& store() const { return store_; }
  std::size_t stash_size() const;
  std::size_t max_stash() const;
  AuditResult audit() const;
  Block peek(std::uint64_t addr) const;
  RegionId data_region() const;
  LeafGeometry leaf_geometry() const;
  std::size_t payload_words() const { return words_for_bits(cfg_.params.block_bits); }

  SuccinctOram* succinct() { return succinct_.get(); }
  PathOram* path() { return path_.get(); }

 private:
  InstanceConfig cfg_;
  PhysicalStore store_;
  std::unique_ptr<PathOram> path_;
  std::unique_ptr<SuccinctOram> succinct_;
};

}  // namespace soram
