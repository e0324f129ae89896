#include <gtest/gtest.h>

#include "soram/path_oram.hpp"
#include "soram/rng.hpp"
#include "soram/stats.hpp"

using namespace soram;

namespace {

PathOramConfig small_config(std::uint64_t n, std::uint64_t seed, PositionMapMode mode = PositionMapMode::InMemory) {
  PathOramConfig c;
  c.block_count = n;
  c.block_bits = 128;
  c.bucket_capacity = 5;
  c.map_mode = mode;
  c.seed = seed;
  return c;
}

Block word_block(std::uint64_t v) { return Block{v, ~v}; }

}  // namespace

TEST(PathOram, WriteThenRead) {
  PhysicalStore store;
  PathOram oram(small_config(64, 1), store);
  oram.init();
  oram.access(17, Op::Write, word_block(99));
  EXPECT_EQ(oram.access(17, Op::Read), word_block(99));
  EXPECT_EQ(oram.access(16, Op::Read), (Block{0, 0}));
}

TEST(PathOram, InitThenScanReturnsInitialValues) {
  PhysicalStore store;
  PathOram oram(small_config(100, 2), store);  // N not a power of two: tree padded
  std::vector<Block> init(100);
  for (std::uint64_t a = 0; a < 100; ++a) init[a] = word_block(a * 3 + 1);
  oram.init(init);
  EXPECT_TRUE(oram.audit().ok);
  for (std::uint64_t a = 0; a < 100; ++a) EXPECT_EQ(oram.access(a, Op::Read), init[a]);
}

TEST(PathOram, BandwidthPerAccess) {
  PhysicalStore store(TraceMode::CountersOnly);
  PathOram oram(small_config(1024, 3), store);
  oram.init();
  store.reset_trace();
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t before = store.reads() + store.writes();
    oram.access(static_cast<std::uint64_t>(i * 7) % 1024, Op::Read);
    ASSERT_EQ(store.reads() + store.writes() - before, 2u * 5 * (10 + 1));
  }
}

TEST(PathOram, InitLabelsAreUniform) {
  PhysicalStore store(TraceMode::CountersOnly);
  PathOram oram(small_config(1u << 14, 4), store);
  oram.init();
  std::vector<std::uint64_t> hist(oram.params().leaf_count(), 0);
  for (std::uint64_t a = 0; a < oram.params().block_count; ++a) ++hist[oram.label_of(a)];
  EXPECT_GT(chi_square_uniform(hist).p_value, 0.01);
}

TEST(PathOram, ReferenceMapAndContainment) {
  for (auto mode : {PositionMapMode::InMemory, PositionMapMode::Recursive}) {
    PhysicalStore store(TraceMode::CountersOnly);
    PathOram oram(small_config(512, 5, mode), store);
    oram.init();
    std::vector<Block> model(512, Block{0, 0});
    Rng rng(6);
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t a = rng.uniform_below(512);
      if (rng.uniform_bits(1)) {
        const Block v = word_block(rng.next());
        ASSERT_EQ(oram.access(a, Op::Write, v), model[a]);
        model[a] = v;
      } else {
        ASSERT_EQ(oram.access(a, Op::Read), model[a]);
      }
      if (i % 997 == 0) ASSERT_TRUE(oram.audit().ok) << oram.audit().error;
    }
    const AuditResult audit = oram.audit();
    EXPECT_TRUE(audit.ok) << audit.error;
    EXPECT_EQ(audit.real_blocks, 512u);
  }
}

TEST(PathOram, RecursiveMapLivesOnTheServer) {
  PhysicalStore store(TraceMode::CountersOnly);
  PathOram oram(small_config(1u << 12, 7, PositionMapMode::Recursive), store);
  EXPECT_TRUE(store.find_region("path.map").has_value());
  oram.init();
  store.reset_trace();
  oram.access(5, Op::Read);
  const RegionInfo& data = store.region(oram.region());
  EXPECT_GT(store.reads(), data.reads);
}

TEST(PathOram, StashStaysBelowRigorousBound) {
  // Z = 5 at N = 2^16 over 10^6 uniform accesses; 114 is the alarm threshold.
  PhysicalStore store(TraceMode::CountersOnly);
  PathOramConfig cfg = small_config(1u << 16, 8);
  PathOram oram(cfg, store);
  oram.init();
  Rng rng(9);
  for (int i = 0; i < 1000000; ++i) oram.access(rng.uniform_below(cfg.block_count), Op::Read);
  EXPECT_LE(oram.max_stash(), 114u);
  EXPECT_TRUE(oram.audit().ok);
}
