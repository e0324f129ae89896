#include "soram/path_oram.hpp"

#include <algorithm>
#include <stdexcept>

#include "soram/meta.hpp"

namespace soram {

PathOram::PathOram(const PathOramConfig& cfg, PhysicalStore& store, const std::string& name)
    : params_(path_oram_params(cfg.block_count, cfg.block_bits, cfg.bucket_capacity, cfg.height)),
      store_(&store),
      cell_bits_(cfg.block_bits + meta_width(params_)),
      payload_words_(words_for_bits(cfg.block_bits)),
      cell_words_(words_for_bits(cell_bits_)),
      rng_(cfg.seed),
      filler_(derive_seed(cfg.seed, 0xF111)) {
  region_ = store.add_region(name, params_.bucket_count() * params_.bucket_capacity, cell_bits_);
  const bool recurse = cfg.map_mode == PositionMapMode::Recursive &&
                       plan_table(params_.block_count, params_.label_width, params_.block_bits).blocks > 1;
  if (recurse) {
    position_map_ = std::make_unique<OramTable>(params_.block_count, params_.label_width, params_.block_bits, store,
                                                name + ".map", derive_seed(cfg.seed, 0x3A9),
                                                SubOramConfig{cfg.map_bucket_capacity, true});
  } else {
    position_map_ = std::make_unique<InMemoryTable>(params_.block_count, params_.label_width);
  }
  cell_buf_.assign(cell_words_, 0);
}

PathOram::~PathOram() = default;

std::uint64_t PathOram::header_of(std::span<const Word> cell) const {
  return get_bits(cell, params_.block_bits, meta_width(params_));
}

void PathOram::set_header(std::span<Word> cell, std::uint64_t header) const {
  set_bits(cell, params_.block_bits, meta_width(params_), header);
}

void PathOram::init(std::span<const Block> payloads) {
  if (initialized_) throw std::logic_error("PathOram::init called twice");
  if (!payloads.empty() && payloads.size() != params_.block_count)
    throw std::invalid_argument("PathOram::init: expected one payload per block");
  const unsigned height = params_.height;
  const std::uint32_t z = params_.bucket_capacity;

  std::vector<std::uint64_t> labels(params_.block_count);
  for (auto& l : labels) l = rng_.uniform_bits(height);

  // Deepest bucket on the label's path with room, else the stash.
  std::vector<std::uint64_t> slot_owner(params_.bucket_count() * z, ~std::uint64_t{0});
  std::vector<std::uint32_t> fill(params_.bucket_count(), 0);
  for (std::uint64_t a = 0; a < params_.block_count; ++a) {
    bool placed = false;
    for (int d = static_cast<int>(height); d >= 0 && !placed; --d) {
      const std::uint64_t b = params_.bucket_on_path(labels[a], static_cast<unsigned>(d));
      if (fill[b] < z) {
        slot_owner[b * z + fill[b]++] = a;
        placed = true;
      }
    }
    if (!placed) {
      Block p(payload_words_, 0);
      if (!payloads.empty()) std::copy_n(payloads[a].begin(), std::min(payloads[a].size(), p.size()), p.begin());
      stash_.insert({a, labels[a], std::move(p)});
    }
  }
  for (std::uint64_t s = 0; s < slot_owner.size(); ++s) {
    std::fill(cell_buf_.begin(), cell_buf_.end(), 0);
    const std::uint64_t a = slot_owner[s];
    if (a == ~std::uint64_t{0}) {
      filler_.fill(std::span(cell_buf_).first(payload_words_));
      mask_tail(std::span(cell_buf_).first(payload_words_), params_.block_bits);
      set_header(cell_buf_, encode_meta(BlockMeta::dummy(), params_));
    } else {
      if (!payloads.empty())
        std::copy_n(payloads[a].begin(), std::min(payloads[a].size(), payload_words_), cell_buf_.begin());
      set_header(cell_buf_, encode_meta(BlockMeta::real(a, labels[a]), params_));
    }
    store_->write(region_, s, cell_buf_);
  }
  position_map_->load(labels);
  max_stash_ = stash_.size();
  initialized_ = true;
}

void PathOram::read_path(std::uint64_t leaf) {
  const std::uint32_t z = params_.bucket_capacity;
  for (unsigned d = 0; d <= params_.height; ++d) {
    const std::uint64_t base = params_.bucket_on_path(leaf, d) * z;
    for (std::uint32_t j = 0; j < z; ++j) {
      store_->read(region_, base + j, cell_buf_);
      const BlockMeta m = decode_meta(header_of(cell_buf_), params_);
      if (m.is_real())
        batch_.push_back({m.addr, m.pos, Block(cell_buf_.begin(), cell_buf_.begin() + payload_words_)});
    }
  }
  stash_.insert_batch(batch_);
}

void PathOram::write_path(std::uint64_t leaf) {
  const std::uint32_t z = params_.bucket_capacity;
  for (int d = static_cast<int>(params_.height); d >= 0; --d) {
    const auto depth = static_cast<unsigned>(d);
    auto [first, last] = stash_.prefix_range(leaf, depth, params_.height);
    // Greedy deepest placement; among eligible blocks the smallest addresses win.
    std::vector<std::size_t> idx(last - first);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = first + i;
    const auto entries = stash_.entries();
    const std::size_t take = std::min<std::size_t>(z, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                      [&](std::size_t a, std::size_t b) { return entries[a].addr < entries[b].addr; });
    idx.resize(take);
    std::sort(idx.begin(), idx.end(), std::greater<>());
    picked_.clear();
    for (std::size_t i : idx) picked_.push_back(stash_.extract_at(i));
    std::sort(picked_.begin(), picked_.end(), [](const auto& a, const auto& b) { return a.addr < b.addr; });

    const std::uint64_t base = params_.bucket_on_path(leaf, depth) * z;
    for (std::uint32_t j = 0; j < z; ++j) {
      std::fill(cell_buf_.begin(), cell_buf_.end(), 0);
      if (j < picked_.size()) {
        std::copy(picked_[j].payload.begin(), picked_[j].payload.end(), cell_buf_.begin());
        set_header(cell_buf_, encode_meta(BlockMeta::real(picked_[j].addr, picked_[j].pos), params_));
      } else {
        filler_.fill(std::span(cell_buf_).first(payload_words_));
        mask_tail(std::span(cell_buf_).first(payload_words_), params_.block_bits);
        set_header(cell_buf_, 0);
      }
      store_->write(region_, base + j, cell_buf_);
    }
  }
}

Block PathOram::access_impl(std::uint64_t addr, const std::function<void(Block&)>& mutate) {
  if (!initialized_) throw std::logic_error("PathOram accessed before init");
  if (addr >= params_.block_count) throw std::out_of_range("PathOram: address out of range");
  ++accesses_;
  const std::uint64_t fresh = rng_.uniform_bits(params_.height);
  const std::uint64_t leaf = position_map_->exchange(addr, fresh);

  read_path(leaf);
  auto entry = stash_.take(addr, leaf);
  if (!entry) throw std::logic_error("PathOram integrity error: block " + std::to_string(addr) + " not found");
  Block old = entry->payload;
  mutate(entry->payload);
  mask_tail(entry->payload, params_.block_bits);
  entry->pos = fresh;
  stash_.insert(std::move(*entry));

  write_path(leaf);
  max_stash_ = std::max(max_stash_, stash_.size());
  return old;
}

Block PathOram::access(std::uint64_t addr, Op op, std::span<const Word> new_value) {
  if (op == Op::Read) return access_impl(addr, [](Block&) {});
  return access_impl(addr, [&](Block& b) {
    std::fill(b.begin(), b.end(), 0);
    std::copy_n(new_value.begin(), std::min(new_value.size(), b.size()), b.begin());
  });
}

Block PathOram::update(std::uint64_t addr, const std::function<void(Block&)>& mutate) {
  return access_impl(addr, mutate);
}

Block PathOram::peek(std::uint64_t addr) const {
  if (const StashEntry* e = stash_.find(addr)) return e->payload;
  const std::uint64_t leaf = position_map_->peek(addr);
  for (unsigned d = 0; d <= params_.height; ++d) {
    const std::uint64_t base = params_.bucket_on_path(leaf, d) * params_.bucket_capacity;
    for (std::uint32_t j = 0; j < params_.bucket_capacity; ++j) {
      const Block cell = store_->peek(region_, base + j);
      const BlockMeta m = decode_meta(header_of(cell), params_);
      if (m.is_real() && m.addr == addr) return Block(cell.begin(), cell.begin() + payload_words_);
    }
  }
  throw std::logic_error("PathOram::peek: block " + std::to_string(addr) + " missing");
}

AuditResult PathOram::audit() const {
  AuditResult r;
  std::vector<std::uint8_t> seen(params_.block_count, 0);
  auto fail = [&](std::string msg) {
    if (r.ok) {
      r.ok = false;
      r.error = std::move(msg);
    }
  };
  for (const auto& e : stash_.entries()) {
    if (e.addr >= params_.block_count) {
      fail("stash entry with invalid address");
      continue;
    }
    if (seen[e.addr]++) fail("block " + std::to_string(e.addr) + " stored twice");
    if (position_map_->peek(e.addr) != e.pos) fail("stash label disagrees with position map");
  }
  const std::uint32_t z = params_.bucket_capacity;
  for (std::uint64_t b = 0; b < params_.bucket_count(); ++b) {
    const unsigned depth = params_.depth_of(b);
    for (std::uint32_t j = 0; j < z; ++j) {
      const BlockMeta m = decode_meta(header_of(store_->peek(region_, b * z + j)), params_);
      if (!m.is_real()) continue;
      if (m.addr >= params_.block_count) {
        fail("slot with invalid address");
        continue;
      }
      if (seen[m.addr]++) fail("block " + std::to_string(m.addr) + " stored twice");
      if (params_.bucket_on_path(m.pos, depth) != b) fail("block " + std::to_string(m.addr) + " off its path");
      if (position_map_->peek(m.addr) != m.pos) fail("slot label disagrees with position map");
    }
  }
  for (std::uint64_t a = 0; a < params_.block_count; ++a) {
    if (seen[a]) ++r.real_blocks;
    else fail("block " + std::to_string(a) + " lost");
  }
  return r;
}

}  // namespace soram
