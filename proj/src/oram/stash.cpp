#include "soram/stash.hpp"

#include <algorithm>

namespace soram {

namespace {

bool key_less(const StashEntry& a, const StashEntry& b) {
  return a.pos != b.pos ? a.pos < b.pos : a.addr < b.addr;
}

}  // namespace

void Stash::insert(StashEntry entry) {
  auto it = std::upper_bound(entries_.begin(), entries_.end(), entry, key_less);
  entries_.insert(it, std::move(entry));
}

void Stash::insert_batch(std::vector<StashEntry>& batch) {
  if (batch.empty()) return;
  const auto old = static_cast<std::ptrdiff_t>(entries_.size());
  std::sort(batch.begin(), batch.end(), key_less);
  std::move(batch.begin(), batch.end(), std::back_inserter(entries_));
  batch.clear();
  std::inplace_merge(entries_.begin(), entries_.begin() + old, entries_.end(), key_less);
}

std::optional<StashEntry> Stash::take(std::uint64_t addr) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [addr](const StashEntry& e) { return e.addr == addr; });
  if (it == entries_.end()) return std::nullopt;
  StashEntry out = std::move(*it);
  entries_.erase(it);
  return out;
}

std::optional<StashEntry> Stash::take(std::uint64_t addr, std::uint64_t pos) {
  StashEntry probe{addr, pos, {}};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, key_less);
  if (it == entries_.end() || it->addr != addr || it->pos != pos) return std::nullopt;
  StashEntry out = std::move(*it);
  entries_.erase(it);
  return out;
}

const StashEntry* Stash::find(std::uint64_t addr) const {
  for (const auto& e : entries_)
    if (e.addr == addr) return &e;
  return nullptr;
}

std::pair<std::size_t, std::size_t> Stash::prefix_range(std::uint64_t leaf, unsigned depth, unsigned height) const {
  const unsigned shift = height - depth;
  const std::uint64_t lo = (leaf >> shift) << shift;
  const std::uint64_t hi = lo + (std::uint64_t{1} << shift);
  auto first = std::lower_bound(entries_.begin(), entries_.end(), lo,
                                [](const StashEntry& e, std::uint64_t v) { return e.pos < v; });
  auto last = std::lower_bound(first, entries_.end(), hi,
                               [](const StashEntry& e, std::uint64_t v) { return e.pos < v; });
  return {static_cast<std::size_t>(first - entries_.begin()), static_cast<std::size_t>(last - entries_.begin())};
}

void Stash::extract(std::size_t first, std::size_t count, std::vector<StashEntry>& out) {
  auto b = entries_.begin() + static_cast<std::ptrdiff_t>(first);
  auto e = b + static_cast<std::ptrdiff_t>(count);
  std::move(b, e, std::back_inserter(out));
  entries_.erase(b, e);
}

StashEntry Stash::extract_at(std::size_t index) {
  auto it = entries_.begin() + static_cast<std::ptrdiff_t>(index);
  StashEntry out = std::move(*it);
  entries_.erase(it);
  return out;
}

}  // namespace soram
