#include "soram/space.hpp"

#include "json.hpp"
#include "soram/meta.hpp"

namespace soram {

namespace {

void add_chain(SpaceReport& r, std::uint64_t entries, unsigned value_bits, std::uint32_t block_bits,
               const SubOramConfig& sub) {
  const TablePlan plan = plan_table(entries, value_bits, block_bits);
  for (const TreeParams& t : path_oram_chain(plan.blocks, block_bits, sub)) {
    r.table_oram_bits += path_oram_tree_bits(t, true);
    r.table_oram_bits_unpadded += path_oram_tree_bits(t, false);
  }
}

}  // namespace

SpaceReport space_report(const TreeParams& p, SpaceMode mode, TableMode tables, const SubOramConfig& sub) {
  SpaceReport r;
  const bool path = p.construction == Construction::PathOram;
  r.data_tree_blocks = path ? p.bucket_count() * p.bucket_capacity : p.slot_count();
  r.data_tree_bits = r.data_tree_blocks * p.block_bits;
  r.extra_blocks_over_N =
      (static_cast<double>(r.data_tree_blocks) - static_cast<double>(p.block_count)) / static_cast<double>(p.block_count);
  if (mode == SpaceMode::Full) {
    if (path) {
      // Headers travel inside each cell; recursive maps are the "tables".
      r.data_tree_bits = path_oram_tree_bits(p, true);
      if (tables == TableMode::Outsourced) {
        const TablePlan map = plan_table(p.block_count, p.label_width, p.block_bits);
        if (map.blocks > 1) add_chain(r, p.block_count, p.label_width, p.block_bits, sub);
      }
    } else {
      r.meta_tree_bits = MetaLayout(p).block_count() * p.block_bits;
      if (tables == TableMode::Outsourced) {
        const bool two = p.construction == Construction::SuccinctTwo;
        add_chain(r, p.block_count, two ? 2 * p.label_width : p.label_width, p.block_bits, sub);
        if (two) add_chain(r, p.leaf_count(), p.addr_width, p.block_bits, sub);
      }
    }
  }
  r.total_bits = r.data_tree_bits + r.meta_tree_bits + r.table_oram_bits;
  return r;
}

std::uint64_t bandwidth_blocks(const TreeParams& p) {
  switch (p.construction) {
    case Construction::PathOram: return 2ULL * p.bucket_capacity * (p.height + 1);
    case Construction::SuccinctOne: return 3 * p.path_slots();
    case Construction::SuccinctTwo: return 4 * p.path_slots();
  }
  return 0;
}

std::string to_json(const SpaceReport& r) {
  nlohmann::json j = {{"data_tree_blocks", r.data_tree_blocks},
                      {"data_tree_bits", r.data_tree_bits},
                      {"meta_tree_bits", r.meta_tree_bits},
                      {"table_oram_bits", r.table_oram_bits},
                      {"table_oram_bits_unpadded", r.table_oram_bits_unpadded},
                      {"total_bits", r.total_bits},
                      {"extra_blocks_over_N", r.extra_blocks_over_N}};
  return j.dump();
}

}  // namespace soram
