#pragma once

#include <cstdint>
#include <string>

#include "soram/params.hpp"
#include "soram/table.hpp"

namespace soram {

enum class SpaceMode {
  Table2,  // data-tree blocks only
  Full,    // plus metadata and outsourced-table ORAMs
};

struct SpaceReport {
  std::uint64_t data_tree_blocks = 0;
  std::uint64_t data_tree_bits = 0;
  std::uint64_t meta_tree_bits = 0;
  std::uint64_t table_oram_bits = 0;
  /// The same tables with every Path ORAM tree sized to exactly its block count (no power-of-two padding).
  std::uint64_t table_oram_bits_unpadded = 0;
  std::uint64_t total_bits = 0;
  /// (data_tree_blocks - N) / N.
  double extra_blocks_over_N = 0;
};

/// Closed-form server space. For TableMode::InMemory no table bits are counted.
SpaceReport space_report(const TreeParams& p, SpaceMode mode, TableMode tables = TableMode::InMemory,
                         const SubOramConfig& sub = {});

/// Closed-form data-block transfers per logical access: 2 Z (L+1) for Path
/// ORAM, 3 (Z L + M) for one choice, 4 (Z L + M) for two choices.
std::uint64_t bandwidth_blocks(const TreeParams& p);

std::string to_json(const SpaceReport& r);

}  // namespace soram
