#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "json.hpp"
#include "soram/rng.hpp"
#include "soram/succinct_oram.hpp"

using namespace soram;

namespace {

SuccinctConfig config(const TreeParams& p, std::uint64_t seed, TableMode mode = TableMode::InMemory) {
  return SuccinctConfig{p, mode, {}, seed};
}

TreeParams tiny(Construction c = Construction::SuccinctOne) { return make_params(c, 16, 64, 3, 2, 5); }

std::size_t real_count(const std::vector<BlockMeta>& metas) {
  std::size_t n = 0;
  for (const auto& m : metas) n += m.is_real();
  return n;
}

}  // namespace

TEST(SuccinctInit, ConservationAndContainment) {
  for (auto c : {Construction::SuccinctOne, Construction::SuccinctTwo}) {
    PhysicalStore store;
    SuccinctOram oram(config(make_params(c, 256, 64, 3, 4, 20), 1), store);
    oram.init();
    std::size_t reals = oram.stash_size();
    for (std::uint64_t b = 0; b < oram.params().bucket_count(); ++b) reals += real_count(oram.peek_bucket_meta(b));
    EXPECT_EQ(reals, 256u);
    const AuditResult a = oram.audit();
    EXPECT_TRUE(a.ok) << a.error;
  }
}

TEST(SuccinctInit, RigorousLeafCapacityNeverOverflows) {
  const TreeParams p = derive_params_t1(1u << 16, 32, 4.0, 128);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PhysicalStore store(TraceMode::CountersOnly);
    SuccinctOram oram(config(p, seed), store);
    EXPECT_EQ(oram.init().leaf_overflows, 0u) << "seed " << seed;
  }
}

TEST(ReadPath, HitDummiesTheSlotAndMissCostsTheSame) {
  PhysicalStore store;
  std::vector<Block> payloads(16);
  for (std::uint64_t a = 0; a < 16; ++a) payloads[a] = Block{a + 100};
  SuccinctOram oram(config(tiny(), 3), store);
  oram.init(payloads);
  // A block sitting in the root.
  const auto root = oram.peek_bucket_meta(0);
  auto it = std::find_if(root.begin(), root.end(), [](const BlockMeta& m) { return m.is_real(); });
  std::uint64_t addr, leaf;
  if (it != root.end()) {
    addr = it->addr;
    leaf = it->pos;
  } else {
    addr = 0;
    leaf = oram.primary_label(0);
  }
  store.reset_trace();
  const auto hit = oram.read_path(leaf, addr);
  const std::size_t hit_len = store.trace().size();
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(*hit, payloads[addr]);
  for (unsigned d = 0; d <= 2; ++d)
    for (const auto& m : oram.peek_bucket_meta(oram.params().bucket_on_path(leaf, d)))
      EXPECT_FALSE(m.is_real() && m.addr == addr);

  store.reset_trace();
  EXPECT_FALSE(oram.read_path(leaf, addr).has_value());  // already removed
  EXPECT_EQ(store.trace().size(), hit_len);
}

TEST(WriteBucket, PlacesAtMostCapacity) {
  for (std::uint64_t leaf = 0; leaf < 4; ++leaf) {
    PhysicalStore store;
    SuccinctOram oram(config(tiny(), 10 + leaf), store);
    oram.init();
    for (unsigned d = 0; d <= 2; ++d) oram.read_bucket(leaf, d);
    const std::size_t eligible = oram.stash_size();  // the root accepts every label
    oram.write_bucket(leaf, 0);
    const std::size_t placed = real_count(oram.peek_bucket_meta(0));
    EXPECT_EQ(placed, std::min<std::size_t>(3, eligible));
    EXPECT_EQ(oram.stash_size(), eligible - placed);
  }
}

TEST(WriteBucket, FiveEligibleThreePlaced) {
  // Drain a full path of the tight tree until at least five blocks wait.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PhysicalStore store;
    SuccinctOram oram(config(tiny(), seed), store);
    oram.init();
    for (std::uint64_t leaf = 0; leaf < 4; ++leaf)
      for (unsigned d = 0; d <= 2; ++d) oram.read_bucket(leaf, d);
    ASSERT_EQ(oram.stash_size(), 16u);
    // Keep only five blocks eligible for bucket 1 (labels 0 and 1) in play.
    const auto [first, last] = oram.stash().prefix_range(0, 1, 2);
    if (last - first < 5) continue;
    oram.write_bucket(0, 1);
    EXPECT_EQ(real_count(oram.peek_bucket_meta(1)), 3u);
    const auto [f2, l2] = oram.stash().prefix_range(0, 1, 2);
    EXPECT_EQ(l2 - f2, (last - first) - 3);
    return;
  }
  FAIL() << "no seed produced five eligible blocks";
}

TEST(WriteBucket, NoEligibleGivesDummies) {
  PhysicalStore store;
  SuccinctOram oram(config(tiny(), 4), store);
  oram.write_bucket(0, 2);
  EXPECT_EQ(real_count(oram.peek_bucket_meta(3)), 0u);
  EXPECT_EQ(oram.stash_size(), 0u);
}

TEST(EvictPath, GreedyExhaustive) {
  PhysicalStore store(TraceMode::CountersOnly);
  const TreeParams p = make_params(Construction::SuccinctOne, 512, 64, 2, 5, 16);
  SuccinctOram oram(config(p, 5), store);
  oram.init();
  Rng rng(6);
  for (int i = 0; i < 3000; ++i) {
    const std::uint64_t leaf = oram.next_eviction_leaf();
    oram.access(rng.uniform_below(512), Op::Read);
    for (const auto& e : oram.stash().entries()) {
      for (unsigned d = 0; d <= p.height; ++d) {
        if ((e.pos >> (p.height - d)) != (leaf >> (p.height - d))) break;
        const std::uint64_t b = p.bucket_on_path(leaf, d);
        ASSERT_EQ(real_count(oram.peek_bucket_meta(b)), p.capacity_of(b)) << "access " << i;
      }
    }
  }
  EXPECT_TRUE(oram.audit().ok);
}

TEST(EvictPath, EmptyTreeRewritesDummies) {
  PhysicalStore store;
  SuccinctOram oram(config(tiny(), 7), store);
  const std::uint64_t leaf = oram.next_eviction_leaf();
  store.reset_trace();
  oram.evict_path();
  EXPECT_EQ(oram.stash_size(), 0u);
  std::size_t data_writes = 0;
  for (const auto& e : store.trace().entries())
    data_writes += e.direction == Direction::Write && e.addr < store.region(oram.data_region()).cells;
  EXPECT_EQ(data_writes, oram.params().path_slots());
  for (unsigned d = 0; d <= 2; ++d)
    EXPECT_EQ(real_count(oram.peek_bucket_meta(oram.params().bucket_on_path(leaf, d))), 0u);
}

TEST(EvictPath, FairnessAndCounter) {
  PhysicalStore store(TraceMode::CountersOnly);
  const TreeParams p = make_params(Construction::SuccinctOne, 256, 64, 3, 5, 12);
  SuccinctOram oram(config(p, 8), store);
  oram.init();
  std::set<std::uint64_t> leaves;
  for (std::uint64_t g = 0; g < p.leaf_count(); ++g) {
    EXPECT_EQ(oram.eviction_counter(), g);
    leaves.insert(oram.next_eviction_leaf());
    oram.access(g % 256, Op::Read);
  }
  EXPECT_EQ(leaves.size(), p.leaf_count());
  EXPECT_EQ(oram.eviction_counter(), 0u);
}

TEST(SuccinctAccess, ReferenceMapBothModes) {
  for (auto c : {Construction::SuccinctOne, Construction::SuccinctTwo}) {
    for (auto mode : {TableMode::InMemory, TableMode::Outsourced}) {
      PhysicalStore store(TraceMode::CountersOnly);
      const TreeParams p = c == Construction::SuccinctOne ? derive_params_t1(1024, 16, 2.0, 128)
                                                          : derive_params_t2(1024, 16, 1.0, 128);
      SuccinctOram oram(config(p, 9, mode), store);
      oram.init();
      std::vector<Block> model(1024, Block(2, 0));
      Rng rng(10);
      for (int i = 0; i < 20000; ++i) {
        const std::uint64_t a = rng.uniform_below(1024);
        if (rng.uniform_bits(1)) {
          const Block v{rng.next(), rng.next()};
          ASSERT_EQ(oram.access(a, Op::Write, v), model[a]);
          model[a] = v;
        } else {
          ASSERT_EQ(oram.access(a, Op::Read), model[a]);
        }
        if (i % 1999 == 0) ASSERT_TRUE(oram.audit().ok) << oram.audit().error;
      }
      const AuditResult audit = oram.audit();
      EXPECT_TRUE(audit.ok) << to_string(c) << " " << to_string(mode) << ": " << audit.error;
    }
  }
}

TEST(SuccinctAccess, DataTransfersPerAccessAreConstant) {
  for (auto c : {Construction::SuccinctOne, Construction::SuccinctTwo}) {
    PhysicalStore store(TraceMode::CountersOnly);
    const TreeParams p = make_params(c, 1024, 64, 3, 5, 40);
    SuccinctOram oram(config(p, 11), store);
    oram.init();
    store.reset_trace();
    const std::uint64_t per = (c == Construction::SuccinctOne ? 3 : 4) * p.path_slots();
    std::optional<std::uint64_t> total;
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
      const RegionInfo& data = store.region(oram.data_region());
      const std::uint64_t before = data.reads + data.writes;
      const std::uint64_t all = store.reads() + store.writes();
      oram.access(rng.uniform_below(1024), Op::Read);
      ASSERT_EQ(data.reads + data.writes - before, per);
      const std::uint64_t moved = store.reads() + store.writes() - all;
      if (!total) total = moved;
      ASSERT_EQ(moved, *total);
    }
  }
}

TEST(SuccinctAccess, OutsourcedTableAccessCounts) {
  {
    PhysicalStore store(TraceMode::CountersOnly);
    SuccinctOram oram(config(derive_params_t1(4096, 16, 2.0, 128), 13, TableMode::Outsourced), store);
    oram.init();
    for (std::uint64_t a = 0; a < 20; ++a) {
      const auto before = oram.position_table().accesses();
      oram.access(a * 31 % 4096, Op::Read);
      EXPECT_EQ(oram.position_table().accesses() - before, 1u);
    }
  }
  {
    PhysicalStore store(TraceMode::CountersOnly);
    SuccinctOram oram(config(derive_params_t2(4096, 16, 1.0, 128), 14, TableMode::Outsourced), store);
    oram.init();
    for (std::uint64_t a = 0; a < 20; ++a) {
      const auto pos = oram.position_table().accesses();
      const auto ctr = oram.counter_table()->accesses();
      oram.access(a * 31 % 4096, Op::Read);
      EXPECT_EQ(oram.position_table().accesses() - pos, 1u);
      EXPECT_EQ(oram.counter_table()->accesses() - ctr, 4u);
    }
  }
}

TEST(SuccinctAccess, CounterConservationAndDegenerateDraws) {
  // Four leaves, so both fresh labels coincide in a quarter of the accesses.
  PhysicalStore store(TraceMode::CountersOnly);
  const TreeParams p = make_params(Construction::SuccinctTwo, 64, 64, 4, 2, 24);
  SuccinctOram oram(config(p, 15), store);
  oram.init();
  Rng rng(16);
  int same = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t a = rng.uniform_below(64);
    oram.access(a, Op::Read);
    std::uint64_t sum = 0;
    for (std::uint64_t l = 0; l < p.leaf_count(); ++l) sum += oram.counter_table()->peek(l);
    ASSERT_EQ(sum, 64u);
    const auto [l1, l2] = oram.labels(a);
    if (l1 == *l2) {
      ++same;
      ASSERT_EQ(oram.primary_label(a), l1);
    }
    if (i % 97 == 0) ASSERT_TRUE(oram.audit().ok) << oram.audit().error;
  }
  EXPECT_GT(same, 0);
  EXPECT_TRUE(oram.audit().ok);
}

TEST(SuccinctAccess, TraceDependsOnlyOnLabels) {
  // Two addresses holding the same label after init produce identical traces.
  const TreeParams p = make_params(Construction::SuccinctOne, 256, 64, 3, 4, 20);
  PhysicalStore probe_store;
  SuccinctOram probe(config(p, 17), probe_store);
  probe.init();
  std::uint64_t a = 0, b = 0;
  bool found = false;
  for (std::uint64_t x = 1; x < 256 && !found; ++x)
    if (probe.primary_label(x) == probe.primary_label(0)) {
      b = x;
      found = true;
    }
  ASSERT_TRUE(found);
  std::vector<TraceEntry> traces[2];
  for (int k = 0; k < 2; ++k) {
    PhysicalStore store;
    SuccinctOram oram(config(p, 17), store);
    oram.init();
    store.reset_trace();
    oram.access(k == 0 ? a : b, Op::Read);
    traces[k] = store.trace().entries();
  }
  EXPECT_EQ(traces[0], traces[1]);
}

TEST(SuccinctAccess, SameSeedSameTrace) {
  const TreeParams p = derive_params_t2(1024, 16, 1.0, 128);
  std::vector<TraceEntry> traces[2];
  for (auto& t : traces) {
    PhysicalStore store;
    SuccinctOram oram(config(p, 18), store);
    oram.init();
    for (std::uint64_t i = 0; i < 300; ++i) oram.access(i * 13 % 1024, Op::Read);
    t = store.trace().entries();
  }
  EXPECT_EQ(traces[0], traces[1]);
}

TEST(SuccinctSnapshot, JsonHoldsEveryBlock) {
  PhysicalStore store;
  SuccinctOram oram(config(tiny(Construction::SuccinctTwo), 19), store);
  oram.init();
  oram.access(3, Op::Read);
  const auto j = nlohmann::json::parse(oram.snapshot_json());
  std::size_t reals = j["stash"].size();
  for (const auto& bucket : j["meta_tree"])
    for (const auto& slot : bucket) reals += slot["type"] == "real";
  EXPECT_EQ(reals, 16u);
  EXPECT_EQ(j["counter_table"].size(), 4u);
  EXPECT_EQ(j["G"], 1);
}
