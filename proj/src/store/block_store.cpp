#include "soram/block_store.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>

namespace soram {

namespace {

std::int64_t epoch_of(const std::vector<std::uint64_t>& marks, std::uint64_t position) {
  // Marks are non-decreasing; the epoch of an entry is the last mark at or before it.
  auto it = std::upper_bound(marks.begin(), marks.end(), position);
  return static_cast<std::int64_t>(it - marks.begin()) - 1;
}

}  // namespace

void AccessTrace::write_csv(std::ostream& out) const {
  out << "epoch,direction,addr\n";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    out << epoch_of(epoch_marks_, i) << ',' << (e.direction == Direction::Read ? "read" : "write") << ',' << e.addr
        << '\n';
  }
}

void AccessTrace::write_jsonl(std::ostream& out) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    out << "{\"epoch\":" << epoch_of(epoch_marks_, i) << ",\"dir\":\"" << (e.direction == Direction::Read ? 'r' : 'w')
        << "\",\"addr\":" << e.addr << "}\n";
  }
}

RegionId PhysicalStore::add_region(std::string name, std::uint64_t cells, std::uint32_t cell_bits) {
  if (cell_bits == 0) throw StoreError("region cell width must be positive");
  if (find_region(name)) throw StoreError("duplicate region name: " + name);
  RegionInfo r;
  r.name = std::move(name);
  r.base = capacity_;
  r.cells = cells;
  r.cell_bits = cell_bits;
  r.words_per_cell = words_for_bits(cell_bits);
  r.word_offset = words_.size();
  words_.resize(words_.size() + r.words_per_cell * cells, 0);
  if (cipher_) nonces_.resize(capacity_ + cells, 0);
  capacity_ += cells;
  regions_.push_back(std::move(r));
  return RegionId{regions_.size() - 1};
}

std::optional<RegionId> PhysicalStore::find_region(const std::string& name) const {
  for (std::size_t i = 0; i < regions_.size(); ++i)
    if (regions_[i].name == name) return RegionId{i};
  return std::nullopt;
}

void PhysicalStore::record(RegionInfo& r, Direction d, std::uint64_t addr) {
  if (d == Direction::Read) {
    ++r.reads;
    ++reads_;
  } else {
    ++r.writes;
    ++writes_;
  }
  if (mode_ == TraceMode::Full) trace_.append(d, addr);
  if (observer_) observer_->on_access(d, addr);
}

void PhysicalStore::read(RegionId id, std::uint64_t index, std::span<Word> out) {
  RegionInfo& r = regions_.at(id.index);
  if (index >= r.cells) throw StoreError("read: address " + std::to_string(index) + " outside region " + r.name);
  if (out.size() < r.words_per_cell) throw StoreError("read: output buffer too small");
  const Word* src = words_.data() + r.word_offset + index * r.words_per_cell;
  std::copy(src, src + r.words_per_cell, out.begin());
  if (cipher_) cipher_->apply(out.first(r.words_per_cell), nonces_[r.base + index]);
  record(r, Direction::Read, r.base + index);
}

void PhysicalStore::write(RegionId id, std::uint64_t index, std::span<const Word> in) {
  RegionInfo& r = regions_.at(id.index);
  if (index >= r.cells) throw StoreError("write: address " + std::to_string(index) + " outside region " + r.name);
  if (in.size() < r.words_per_cell) throw StoreError("write: payload too small");
  Word* dst = words_.data() + r.word_offset + index * r.words_per_cell;
  std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(r.words_per_cell), dst);
  mask_tail({dst, r.words_per_cell}, r.cell_bits);
  if (cipher_) {
    SealedBlock sealed = cipher_->seal({dst, r.words_per_cell});
    std::copy(sealed.body.begin(), sealed.body.end(), dst);
    nonces_[r.base + index] = sealed.counter;
  }
  record(r, Direction::Write, r.base + index);
}

std::pair<const RegionInfo*, std::uint64_t> PhysicalStore::resolve(std::uint64_t addr) const {
  for (const auto& r : regions_)
    if (addr >= r.base && addr < r.base + r.cells) return {&r, addr - r.base};
  throw StoreError("address " + std::to_string(addr) + " out of range (capacity " + std::to_string(capacity_) + ")");
}

Block PhysicalStore::read_block(std::uint64_t addr) {
  auto [r, index] = resolve(addr);
  Block out(r->words_per_cell);
  read(RegionId{static_cast<std::size_t>(r - regions_.data())}, index, out);
  return out;
}

void PhysicalStore::write_block(std::uint64_t addr, std::span<const Word> payload) {
  auto [r, index] = resolve(addr);
  Block tmp(r->words_per_cell, 0);
  std::copy_n(payload.begin(), std::min(payload.size(), tmp.size()), tmp.begin());
  write(RegionId{static_cast<std::size_t>(r - regions_.data())}, index, tmp);
}

Block PhysicalStore::peek(RegionId id, std::uint64_t index) const {
  const RegionInfo& r = regions_.at(id.index);
  if (index >= r.cells) throw StoreError("peek: address outside region " + r.name);
  const Word* src = words_.data() + r.word_offset + index * r.words_per_cell;
  Block out(src, src + r.words_per_cell);
  if (cipher_) cipher_->apply(out, nonces_[r.base + index]);
  return out;
}

Block PhysicalStore::raw(RegionId id, std::uint64_t index) const {
  const RegionInfo& r = regions_.at(id.index);
  if (index >= r.cells) throw StoreError("raw: address outside region " + r.name);
  const Word* src = words_.data() + r.word_offset + index * r.words_per_cell;
  return Block(src, src + r.words_per_cell);
}

std::uint64_t PhysicalStore::allocated_bits() const {
  std::uint64_t total = 0;
  for (const auto& r : regions_) total += r.cells * r.cell_bits;
  return total;
}

void PhysicalStore::reset_trace() {
  trace_.clear();
  reads_ = writes_ = epochs_ = 0;
  for (auto& r : regions_) r.reads = r.writes = 0;
}

void PhysicalStore::mark_epoch() {
  ++epochs_;
  trace_.mark(trace_.size());
  if (observer_) observer_->on_epoch();
}

void PhysicalStore::enable_encryption(const CipherKey& key) {
  cipher_.emplace(key, true);
  nonces_.assign(capacity_, 0);
  // Existing plaintext cells become sealed under fresh counters.
  for (std::size_t ri = 0; ri < regions_.size(); ++ri) {
    const auto& r = regions_[ri];
    for (std::uint64_t i = 0; i < r.cells; ++i) {
      Word* dst = words_.data() + r.word_offset + i * r.words_per_cell;
      SealedBlock sealed = cipher_->seal({dst, r.words_per_cell});
      std::copy(sealed.body.begin(), sealed.body.end(), dst);
      nonces_[r.base + i] = sealed.counter;
    }
  }
}

}  // namespace soram
