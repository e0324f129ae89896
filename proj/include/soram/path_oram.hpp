#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "soram/block_store.hpp"
#include "soram/params.hpp"
#include "soram/rng.hpp"
#include "soram/stash.hpp"
#include "soram/table.hpp"

namespace soram {

enum class PositionMapMode { InMemory, Recursive };

struct PathOramConfig {
  std::uint64_t block_count = 0;
  std::uint32_t block_bits = 0;
  std::uint32_t bucket_capacity = 5;
  std::optional<unsigned> height;  // default ceil(lg N)
  PositionMapMode map_mode = PositionMapMode::InMemory;
  std::uint64_t seed = 0;
  /// Bucket size of the recursive position-map ORAMs.
  std::uint32_t map_bucket_capacity = 5;
};

struct AuditResult {
  bool ok = true;
  std::string error;
  std::uint64_t real_blocks = 0;
};

/// Tree ORAM with uniform buckets that reads and rewrites the accessed path
/// on every access. Cells hold the payload followed by a (type, addr, label)
/// header.
class PathOram {
 public:
  PathOram(const PathOramConfig& cfg, PhysicalStore& store, const std::string& name = "path");
  ~PathOram();

  PathOram(const PathOram&) = delete;
  PathOram& operator=(const PathOram&) = delete;

  /// Places every block (zeros when `payloads` is empty) under uniform labels.
  void init(std::span<const Block> payloads = {});

  Block access(std::uint64_t addr, Op op, std::span<const Word> new_value = {});

  /// Read-modify-write of one block in a single access; returns the old value.
  Block update(std::uint64_t addr, const std::function<void(Block&)>& mutate);

  /// Current value without touching the server trace.
  Block peek(std::uint64_t addr) const;
  std::uint64_t label_of(std::uint64_t addr) const { return position_map_->peek(addr); }

  /// Every real block is either stashed or on its label's path, exactly once.
  AuditResult audit() const;

  const TreeParams& params() const { return params_; }
  std::uint32_t cell_bits() const { return cell_bits_; }
  std::size_t stash_size() const { return stash_.size(); }
  std::size_t max_stash() const { return max_stash_; }
  std::uint64_t accesses() const { return accesses_; }
  RegionId region() const { return region_; }
  const PackedTable& position_map() const { return *position_map_; }
  std::size_t words_per_block() const { return payload_words_; }

 private:
  Block access_impl(std::uint64_t addr, const std::function<void(Block&)>& mutate);
  void read_path(std::uint64_t leaf);
  void write_path(std::uint64_t leaf);
  std::uint64_t header_of(std::span<const Word> cell) const;
  void set_header(std::span<Word> cell, std::uint64_t header) const;

  TreeParams params_;
  PhysicalStore* store_;
  RegionId region_;
  std::uint32_t cell_bits_;
  std::size_t payload_words_;
  std::size_t cell_words_;
  std::unique_ptr<PackedTable> position_map_;
  Stash stash_;
  Rng rng_;
  SplitMix64 filler_;
  std::size_t max_stash_ = 0;
  std::uint64_t accesses_ = 0;
  bool initialized_ = false;
  Block cell_buf_;
  std::vector<StashEntry> batch_;
  std::vector<StashEntry> picked_;
};

}  // namespace soram
