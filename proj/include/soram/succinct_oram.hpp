#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soram/block_store.hpp"
#include "soram/meta.hpp"
#include "soram/params.hpp"
#include "soram/path_oram.hpp"
#include "soram/rng.hpp"
#include "soram/stash.hpp"
#include "soram/table.hpp"

namespace soram {

struct SuccinctConfig {
  TreeParams params;
  TableMode table_mode = TableMode::InMemory;
  SubOramConfig sub_oram;
  std::uint64_t seed = 0;
};

struct InitStats {
  /// Blocks whose leaf bucket was already full at placement time.
  std::uint64_t leaf_overflows = 0;
  /// Blocks that found no room anywhere on their path.
  std::uint64_t stashed = 0;
};

/// Bucket occupancy by logical address, for oracle comparisons.
struct TreeSnapshot {
  std::vector<std::vector<std::uint64_t>> buckets;  // sorted addresses per bucket
  std::vector<std::uint32_t> holes;                 // slots vacated by read_path since the bucket was last written
  std::vector<std::uint64_t> stash;                 // sorted addresses
};

/// The succinct tree ORAM with bit-reversal eviction. With
/// Construction::SuccinctOne each block has one label; with
/// Construction::SuccinctTwo each block has two labels and the primary is
/// picked by the counter table (two-choice placement).
///
/// The data tree has internal buckets of Z slots and leaf buckets of M
/// slots. Slot metadata (type, addr, pos) is kept in a separate region as
/// one breadth-first bitstring cut into B-bit blocks.
class SuccinctOram {
 public:
  SuccinctOram(const SuccinctConfig& cfg, PhysicalStore& store);
  ~SuccinctOram();

  SuccinctOram(const SuccinctOram&) = delete;
  SuccinctOram& operator=(const SuccinctOram&) = delete;

  /// Draws labels for every block and writes the whole tree. Payloads default to zeros.
  InitStats init(std::span<const Block> payloads = {});

  /// Dispatches to access_t1 or access_t2. Returns the value before the access.
  Block access(std::uint64_t addr, Op op, std::span<const Word> new_value = {});
  Block access_t1(std::uint64_t addr, Op op, std::span<const Word> new_value = {});
  Block access_t2(std::uint64_t addr, Op op, std::span<const Word> new_value = {});

  // Subroutines, exposed for tests and instrumentation.

  /// Scans the whole path; on a (real, addr, leaf) hit returns the payload and dummies the slot.
  std::optional<Block> read_path(std::uint64_t leaf, std::uint64_t addr);
  /// Drains P(bit_reversal(G mod 2^L)) into the stash, refills it leaf to root, advances G.
  void evict_path();
  /// Moves every real block of the depth-`depth` bucket on P(leaf) into the stash.
  void read_bucket(std::uint64_t leaf, unsigned depth);
  /// Fills the depth-`depth` bucket on P(leaf) from stash blocks with a matching label prefix.
  void write_bucket(std::uint64_t leaf, unsigned depth);

  // Introspection (untraced).

  const TreeParams& params() const { return params_; }
  const Stash& stash() const { return stash_; }
  std::size_t stash_size() const { return stash_.size(); }
  std::size_t max_stash() const { return max_stash_; }
  /// G mod 2^L.
  std::uint64_t eviction_counter() const { return evict_count_; }
  std::uint64_t next_eviction_leaf() const { return bit_reversal(evict_count_, params_.height); }
  std::uint64_t accesses() const { return accesses_; }
  const InitStats& init_stats() const { return init_stats_; }

  RegionId data_region() const { return data_region_; }
  RegionId meta_region() const { return meta_region_; }
  const MetaLayout& meta_layout() const { return layout_; }
  const PackedTable& position_table() const { return *position_table_; }
  const PackedTable* counter_table() const { return counter_table_.get(); }

  /// Primary label of a block (the stored label for T1).
  std::uint64_t primary_label(std::uint64_t addr) const;
  /// Both labels as stored in the position table (second is absent for T1).
  std::pair<std::uint64_t, std::optional<std::uint64_t>> labels(std::uint64_t addr) const;

  Block peek(std::uint64_t addr) const;
  std::vector<BlockMeta> peek_bucket_meta(std::uint64_t bucket) const;

  /// Checks both tree invariants, conservation of the N blocks, agreement
  /// with the position table and (T2) the counter table recount.
  AuditResult audit() const;

  TreeSnapshot snapshot() const;
  /// Metadata tree, stash and tables as JSON text.
  std::string snapshot_json() const;

 private:
  void load_meta(std::uint64_t bucket);
  void store_meta(std::uint64_t bucket);
  std::uint64_t meta_entry(std::uint32_t slot) const;
  void set_meta_entry(std::uint32_t slot, std::uint64_t bits);
  void fill_garbage(std::span<Word> payload);
  Block finish_access(std::uint64_t addr, std::uint64_t new_label, Op op, std::span<const Word> new_value, Block value);
  std::uint64_t pack_pair(std::uint64_t first, std::uint64_t second) const {
    return first | (second << params_.label_width);
  }

  TreeParams params_;
  MetaLayout layout_;
  PhysicalStore* store_;
  RegionId data_region_;
  RegionId meta_region_;
  std::size_t payload_words_;
  std::unique_ptr<PackedTable> position_table_;
  std::unique_ptr<PackedTable> counter_table_;
  Stash stash_;
  Rng rng_;
  SplitMix64 filler_;
  std::uint64_t evict_count_ = 0;
  std::uint64_t accesses_ = 0;
  std::size_t max_stash_ = 0;
  bool initialized_ = false;
  InitStats init_stats_;
  std::vector<std::uint32_t> holes_;
  /// Metadata blocks moved per bucket at each depth, fixed so the trace length does not depend on the path.
  std::vector<std::uint64_t> meta_window_;

  // Scratch for the bucket currently being processed.
  std::uint64_t meta_first_block_ = 0;
  std::uint64_t meta_block_span_ = 0;
  std::uint64_t meta_bit_base_ = 0;
  Block meta_buf_;
  Block block_buf_;
  Block slot_buf_;
  std::vector<StashEntry> batch_;
  std::vector<StashEntry> picked_;
};

}  // namespace soram
