#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "soram/block_store.hpp"
#include "soram/params.hpp"

namespace soram {

enum class Op { Read, Write };

/// Where an ORAM keeps its position table (and counter table).
enum class TableMode { InMemory, Outsourced };

std::string_view to_string(TableMode m);
TableMode table_mode_from_string(std::string_view s);

/// Shape of the Path ORAM used to hold outsourced tables.
struct SubOramConfig {
  std::uint32_t bucket_capacity = 5;
  /// Recurse on the sub-ORAM's own position map until it fits in one block.
  bool recursive = true;
};

/// Packing of fixed-width entries into B-bit blocks.
struct TablePlan {
  std::uint64_t entries = 0;
  unsigned value_bits = 0;
  std::uint32_t per_block = 0;  // floor(B / value_bits)
  std::uint64_t blocks = 0;     // ceil(entries / per_block)
};

TablePlan plan_table(std::uint64_t entries, unsigned value_bits, std::uint32_t block_bits);

/// Parameters of a Path ORAM holding `blocks` blocks followed by those of its
/// recursive position maps (the last map, fitting in one block, stays with
/// the user and is not listed).
std::vector<TreeParams> path_oram_chain(std::uint64_t blocks, std::uint32_t block_bits, const SubOramConfig& cfg);

/// Server bits of one Path ORAM tree: cells carry the payload plus a
/// (type, addr, label) header.
std::uint64_t path_oram_tree_bits(const TreeParams& p, bool padded = true);

/// An array of unsigned integers of fixed bit width. Every call other than
/// `load` and `peek` counts as one table access.
class PackedTable {
 public:
  virtual ~PackedTable() = default;

  virtual std::uint64_t size() const = 0;
  virtual unsigned value_bits() const = 0;

  virtual void load(std::span<const std::uint64_t> values) = 0;
  virtual std::uint64_t read(std::uint64_t index) = 0;
  /// Writes `value`, returning the previous entry, as a single access.
  virtual std::uint64_t exchange(std::uint64_t index, std::uint64_t value) = 0;
  /// Adds `delta`, returning the new entry, as a single access.
  virtual std::uint64_t add(std::uint64_t index, std::int64_t delta) = 0;
  /// Untraced read for audits.
  virtual std::uint64_t peek(std::uint64_t index) const = 0;

  std::uint64_t accesses() const { return accesses_; }

 protected:
  std::uint64_t accesses_ = 0;
};

class InMemoryTable final : public PackedTable {
 public:
  InMemoryTable(std::uint64_t size, unsigned value_bits) : values_(size, 0), bits_(value_bits) {}

  std::uint64_t size() const override { return values_.size(); }
  unsigned value_bits() const override { return bits_; }
  void load(std::span<const std::uint64_t> values) override;
  std::uint64_t read(std::uint64_t index) override;
  std::uint64_t exchange(std::uint64_t index, std::uint64_t value) override;
  std::uint64_t add(std::uint64_t index, std::int64_t delta) override;
  std::uint64_t peek(std::uint64_t index) const override { return values_.at(index); }

 private:
  std::vector<std::uint64_t> values_;
  unsigned bits_;
};

class PathOram;

/// Table packed floor(B/w) entries per block inside a Path ORAM on the server.
class OramTable final : public PackedTable {
 public:
  OramTable(std::uint64_t size, unsigned value_bits, std::uint32_t block_bits, PhysicalStore& store,
            const std::string& name, std::uint64_t seed, const SubOramConfig& cfg);
  ~OramTable() override;

  std::uint64_t size() const override { return plan_.entries; }
  unsigned value_bits() const override { return plan_.value_bits; }
  void load(std::span<const std::uint64_t> values) override;
  std::uint64_t read(std::uint64_t index) override;
  std::uint64_t exchange(std::uint64_t index, std::uint64_t value) override;
  std::uint64_t add(std::uint64_t index, std::int64_t delta) override;
  std::uint64_t peek(std::uint64_t index) const override;

  const TablePlan& plan() const { return plan_; }
  const PathOram& oram() const { return *oram_; }

 private:
  TablePlan plan_;
  std::unique_ptr<PathOram> oram_;
};

/// Builds an in-memory table or a Path ORAM-backed one.
std::unique_ptr<PackedTable> make_table(TableMode mode, std::uint64_t size, unsigned value_bits,
                                        std::uint32_t block_bits, PhysicalStore& store, const std::string& name,
                                        std::uint64_t seed, const SubOramConfig& cfg);

}  // namespace soram
