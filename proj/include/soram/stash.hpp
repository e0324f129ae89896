#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "soram/bits.hpp"

namespace soram {

struct StashEntry {
  std::uint64_t addr = 0;
  std::uint64_t pos = 0;
  Block payload;
};

/// User-side block buffer ordered by (pos, addr). Blocks whose labels share
/// a depth-i prefix form one contiguous run, so eviction eligibility is a
/// range query.
class Stash {
 public:
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const StashEntry> entries() const { return entries_; }

  void insert(StashEntry entry);
  /// Appends a batch and restores the order in one merge.
  void insert_batch(std::vector<StashEntry>& batch);

  /// Removes and returns the entry for `addr`, if present.
  std::optional<StashEntry> take(std::uint64_t addr);
  /// Same, using the known label to locate it by binary search.
  std::optional<StashEntry> take(std::uint64_t addr, std::uint64_t pos);
  const StashEntry* find(std::uint64_t addr) const;

  /// Index range [first, last) of entries whose `height`-bit label has the
  /// same top `depth` bits as `leaf`.
  std::pair<std::size_t, std::size_t> prefix_range(std::uint64_t leaf, unsigned depth, unsigned height) const;

  /// Removes entries [first, first + count) and moves them into `out`.
  void extract(std::size_t first, std::size_t count, std::vector<StashEntry>& out);
  /// Removes the single entry at `index`.
  StashEntry extract_at(std::size_t index);

  void clear() { entries_.clear(); }

 private:
  std::vector<StashEntry> entries_;
};

}  // namespace soram
