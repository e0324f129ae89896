#include <gtest/gtest.h>

#include <sstream>

#include "soram/block_store.hpp"
#include "soram/cipher.hpp"
#include "soram/rng.hpp"
#include "soram/space.hpp"

using namespace soram;

TEST(PhysicalStore, WriteThenRead) {
  PhysicalStore store;
  const RegionId r = store.add_region("cells", 16, 100);
  store.write(r, 5, Block{0x1234, 0xFFFFFFFFFFFFFFFFull});
  Block out(2);
  store.read(r, 5, out);
  EXPECT_EQ(out[0], 0x1234u);
  EXPECT_EQ(out[1], 0xFFFFFFFFFull);  // masked to 100 bits
}

TEST(PhysicalStore, FreshCellsAreZero) {
  PhysicalStore store;
  store.add_region("cells", 4, 64);
  EXPECT_EQ(store.read_block(0), Block{0});
}

TEST(PhysicalStore, OverwriteAndIndependence) {
  PhysicalStore store;
  store.add_region("a", 8, 64);
  store.add_region("b", 8, 64);
  store.write_block(3, Block{1});
  store.write_block(11, Block{2});
  store.write_block(3, Block{7});
  EXPECT_EQ(store.read_block(3), Block{7});
  EXPECT_EQ(store.read_block(11), Block{2});
  EXPECT_EQ(store.read_block(4), Block{0});
  EXPECT_THROW(store.read_block(16), StoreError);
  EXPECT_THROW(store.add_region("a", 1, 8), StoreError);
}

TEST(PhysicalStore, TraceRecordsEveryRequestInOrder) {
  PhysicalStore store;
  store.add_region("cells", 128, 64);
  for (std::uint64_t i = 0; i < 100; ++i) store.read_block(i);
  ASSERT_EQ(store.trace().size(), 100u);
  for (std::uint64_t i = 0; i < 100; ++i)
    EXPECT_EQ(store.trace().entries()[i], (TraceEntry{Direction::Read, i}));
  store.write_block(9, Block{1});
  EXPECT_EQ(store.trace().entries().back(), (TraceEntry{Direction::Write, 9}));
  EXPECT_EQ(store.reads() + store.writes(), store.trace().size());
}

TEST(PhysicalStore, CountersOnlyKeepsCounts) {
  PhysicalStore store(TraceMode::CountersOnly);
  const RegionId r = store.add_region("cells", 8, 64);
  store.mark_epoch();
  store.read_block(1);
  store.write_block(2, Block{3});
  EXPECT_EQ(store.trace().size(), 0u);
  EXPECT_EQ(store.region(r).reads, 1u);
  EXPECT_EQ(store.region(r).writes, 1u);
  EXPECT_EQ(store.epochs(), 1u);
  store.reset_trace();
  EXPECT_EQ(store.reads() + store.writes(), 0u);
}

TEST(PhysicalStore, CsvExportCarriesEpochs) {
  PhysicalStore store;
  store.add_region("cells", 8, 64);
  store.read_block(0);
  store.mark_epoch();
  store.write_block(1, Block{1});
  std::ostringstream out;
  store.trace().write_csv(out);
  EXPECT_EQ(out.str(), "epoch,direction,addr\n-1,read,0\n0,write,1\n");
}

TEST(PhysicalStore, RandomInterleavingsReadYourWrites) {
  PhysicalStore store;
  store.add_region("cells", 64, 130);
  std::vector<Block> model(64, Block(3, 0));
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t a = rng.uniform_below(64);
    if (rng.uniform_bits(1)) {
      Block v(3);
      rng.fill(v);
      mask_tail(v, 130);
      store.write_block(a, v);
      model[a] = v;
    } else {
      ASSERT_EQ(store.read_block(a), model[a]);
    }
  }
  EXPECT_EQ(store.trace().size(), 5000u);
}

TEST(PhysicalStore, EncryptionIsTransparentButChangesStoredCells) {
  PhysicalStore store;
  const RegionId r = store.add_region("cells", 4, 128);
  store.write(r, 0, Block{42, 43});
  store.enable_encryption(key_from_seed(9));
  EXPECT_EQ(store.peek(r, 0), (Block{42, 43}));
  EXPECT_NE(store.raw(r, 0), (Block{42, 43}));
  store.write(r, 1, Block{42, 43});
  EXPECT_NE(store.raw(r, 1), store.raw(r, 0));
  EXPECT_EQ(store.read_block(1), (Block{42, 43}));
}

TEST(Cipher, RoundTripAndFreshness) {
  CounterModeCipher c(key_from_seed(1));
  Rng rng(2);
  Block p(16);
  rng.fill(p);
  const SealedBlock s1 = c.seal(p);
  const SealedBlock s2 = c.seal(p);
  EXPECT_EQ(c.open(s1), p);
  EXPECT_EQ(c.open(s2), p);
  EXPECT_NE(s1.body, s2.body);
  EXPECT_EQ(s2.counter, s1.counter + 1);
}

TEST(Cipher, DisabledIsIdentityWithCounterBump) {
  CounterModeCipher c(key_from_seed(1), false);
  const Block p{1, 2, 3};
  const auto before = c.next_counter();
  const SealedBlock s = c.seal(p);
  EXPECT_EQ(s.body, p);
  EXPECT_EQ(c.next_counter(), before + 1);
}

TEST(Space, TableTwoExtraSpace) {
  const std::uint64_t n = 1u << 20;
  auto extra_blocks = [&](Construction c, std::uint32_t z, unsigned l, std::uint32_t m) {
    return space_report(make_params(c, n, 1024, z, l, m), SpaceMode::Table2).data_tree_blocks - n;
  };
  EXPECT_EQ(extra_blocks(Construction::SuccinctOne, 3, 15, 112), 2719741u);
  EXPECT_EQ(extra_blocks(Construction::SuccinctOne, 4, 15, 36), 262140u);
  EXPECT_EQ(extra_blocks(Construction::SuccinctTwo, 3, 16, 14), 65533u);
  EXPECT_NEAR(space_report(path_oram_params(n, 1024, 5), SpaceMode::Table2).extra_blocks_over_N, 9.0, 1e-5);
  EXPECT_NEAR(space_report(path_oram_params(n, 1024, 4, 19), SpaceMode::Table2).extra_blocks_over_N, 3.0, 1e-5);
}

TEST(Space, BandwidthClosedForms) {
  const std::uint64_t n = 1u << 20;
  EXPECT_EQ(bandwidth_blocks(path_oram_params(n, 1024, 5)), 210u);
  EXPECT_EQ(bandwidth_blocks(path_oram_params(n, 1024, 4, 19)), 160u);
  EXPECT_EQ(bandwidth_blocks(make_params(Construction::SuccinctOne, n, 1024, 3, 15, 112)), 471u);
  EXPECT_EQ(bandwidth_blocks(make_params(Construction::SuccinctOne, n, 1024, 4, 15, 36)), 288u);
  EXPECT_EQ(bandwidth_blocks(make_params(Construction::SuccinctTwo, n, 1024, 3, 16, 14)), 248u);
}
