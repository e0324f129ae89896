#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "soram/bits.hpp"
#include "soram/cipher.hpp"

namespace soram {

enum class Direction : std::uint8_t { Read, Write };

struct TraceEntry {
  Direction direction;
  std::uint64_t addr;
  bool operator==(const TraceEntry&) const = default;
};

/// The adversary's view: every physical request in time order, with epoch
/// marks at the start of each logical access.
class AccessTrace {
 public:
  const std::vector<TraceEntry>& entries() const { return entries_; }
  const std::vector<std::uint64_t>& epoch_marks() const { return epoch_marks_; }
  std::size_t size() const { return entries_.size(); }

  void append(Direction d, std::uint64_t addr) { entries_.push_back({d, addr}); }
  void mark(std::uint64_t position) { epoch_marks_.push_back(position); }
  void clear() {
    entries_.clear();
    epoch_marks_.clear();
  }

  /// `epoch,direction,addr` with a header line. Entries before the first mark get epoch -1.
  void write_csv(std::ostream& out) const;
  /// One {"epoch":..,"dir":"r"|"w","addr":..} object per line.
  void write_jsonl(std::ostream& out) const;

 private:
  std::vector<TraceEntry> entries_;
  std::vector<std::uint64_t> epoch_marks_;
};

enum class TraceMode { Full, CountersOnly };

/// Streaming hook over the physical request sequence.
class TraceObserver {
 public:
  virtual ~TraceObserver() = default;
  virtual void on_access(Direction d, std::uint64_t addr) = 0;
  virtual void on_epoch() {}
};

class StoreError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct RegionId {
  std::size_t index = 0;
  bool operator==(const RegionId&) const = default;
};

struct RegionInfo {
  std::string name;
  std::uint64_t base = 0;   // first global address
  std::uint64_t cells = 0;
  std::uint32_t cell_bits = 0;
  std::size_t words_per_cell = 0;
  std::size_t word_offset = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
};

/// Simulated honest-but-curious server: a flat array of cells partitioned
/// into named regions. Every read and write is counted per region and
/// (in Full mode) appended to the trace.
class PhysicalStore {
 public:
  explicit PhysicalStore(TraceMode mode = TraceMode::Full) : mode_(mode) {}

  PhysicalStore(const PhysicalStore&) = delete;
  PhysicalStore& operator=(const PhysicalStore&) = delete;

  RegionId add_region(std::string name, std::uint64_t cells, std::uint32_t cell_bits);
  const RegionInfo& region(RegionId id) const { return regions_.at(id.index); }
  const std::vector<RegionInfo>& regions() const { return regions_; }
  std::optional<RegionId> find_region(const std::string& name) const;

  void read(RegionId id, std::uint64_t index, std::span<Word> out);
  void write(RegionId id, std::uint64_t index, std::span<const Word> in);

  /// Global-address interface.
  Block read_block(std::uint64_t addr);
  void write_block(std::uint64_t addr, std::span<const Word> payload);

  /// Untraced, uncounted plaintext view for audits and snapshots.
  Block peek(RegionId id, std::uint64_t index) const;
  /// Stored cell as the server holds it (ciphertext when encrypted).
  Block raw(RegionId id, std::uint64_t index) const;

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t reads() const { return reads_; }
  std::uint64_t writes() const { return writes_; }
  /// Sum over regions of cells * cell_bits.
  std::uint64_t allocated_bits() const;

  const AccessTrace& trace() const { return trace_; }
  TraceMode trace_mode() const { return mode_; }
  void set_trace_mode(TraceMode mode) { mode_ = mode; }
  /// Clears the trace, epoch marks and all counters; cell contents stay.
  void reset_trace();
  void mark_epoch();
  std::uint64_t epochs() const { return epochs_; }

  void set_observer(TraceObserver* observer) { observer_ = observer; }

  /// Turns on sealing of every cell written from now on.
  void enable_encryption(const CipherKey& key);
  bool encrypted() const { return cipher_.has_value(); }

 private:
  std::pair<const RegionInfo*, std::uint64_t> resolve(std::uint64_t addr) const;
  void record(RegionInfo& r, Direction d, std::uint64_t addr);

  TraceMode mode_;
  std::vector<RegionInfo> regions_;
  std::vector<Word> words_;
  std::vector<std::uint64_t> nonces_;  // per cell, only when encrypted
  std::uint64_t capacity_ = 0;
  std::uint64_t reads_ = 0;
  std::uint64_t writes_ = 0;
  std::uint64_t epochs_ = 0;
  AccessTrace trace_;
  TraceObserver* observer_ = nullptr;
  std::optional<CounterModeCipher> cipher_;
};

}  // namespace soram
