#include "soram/succinct_oram.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace soram {

namespace {

constexpr std::uint64_t kNone = ~std::uint64_t{0};

}  // namespace

SuccinctOram::SuccinctOram(const SuccinctConfig& cfg, PhysicalStore& store)
    : params_(cfg.params),
      layout_(cfg.params),
      store_(&store),
      payload_words_(words_for_bits(cfg.params.block_bits)),
      rng_(cfg.seed),
      filler_(derive_seed(cfg.seed, 0xF111)) {
  if (params_.construction == Construction::PathOram)
    throw ParamError("SuccinctOram needs construction t1 or t2, not path");
  data_region_ = store.add_region("data", params_.slot_count(), params_.block_bits);
  meta_region_ = store.add_region("meta", layout_.block_count(), params_.block_bits);

  const bool two = params_.construction == Construction::SuccinctTwo;
  const unsigned pos_bits = two ? 2 * params_.label_width : params_.label_width;
  position_table_ = make_table(cfg.table_mode, params_.block_count, pos_bits, params_.block_bits, store, "pos",
                               derive_seed(cfg.seed, 0x905), cfg.sub_oram);
  if (two) {
    counter_table_ = make_table(cfg.table_mode, params_.leaf_count(), params_.addr_width, params_.block_bits, store,
                                "ctr", derive_seed(cfg.seed, 0xC72), cfg.sub_oram);
  }
  holes_.assign(params_.bucket_count(), 0);
  meta_window_.assign(params_.height + 1, 1);
  for (std::uint64_t b = 0; b < params_.bucket_count(); ++b) {
    const auto [first, last] = layout_.bucket_blocks(b);
    auto& w = meta_window_[params_.depth_of(b)];
    w = std::max(w, last - first + 1);
  }
  block_buf_.assign(payload_words_, 0);
  slot_buf_.assign(payload_words_, 0);
}

SuccinctOram::~SuccinctOram() = default;

void SuccinctOram::fill_garbage(std::span<Word> payload) {
  filler_.fill(payload);
  mask_tail(payload, params_.block_bits);
}

InitStats SuccinctOram::init(std::span<const Block> payloads) {
  if (initialized_) throw std::logic_error("SuccinctOram::init called twice");
  if (!payloads.empty() && payloads.size() != params_.block_count)
    throw std::invalid_argument("SuccinctOram::init: expected one payload per block");
  const std::uint64_t n = params_.block_count;
  const unsigned height = params_.height;
  const bool two = params_.construction == Construction::SuccinctTwo;

  std::vector<std::uint64_t> primary(n);
  std::vector<std::uint64_t> table(n);
  std::vector<std::uint64_t> counters(two ? params_.leaf_count() : 0, 0);
  for (std::uint64_t a = 0; a < n; ++a) {
    if (!two) {
      primary[a] = table[a] = rng_.uniform_bits(height);
      continue;
    }
    const std::uint64_t l1 = rng_.uniform_bits(height);
    const std::uint64_t l2 = rng_.uniform_bits(height);
    const std::uint64_t chosen = counters[l2] < counters[l1] ? l2 : l1;
    ++counters[chosen];
    primary[a] = chosen;
    table[a] = pack_pair(l1, l2);
  }

  // Deepest bucket with room on the primary path; the stash as last resort.
  InitStats stats;
  std::vector<std::uint64_t> owner(params_.slot_count(), kNone);
  std::vector<std::uint32_t> fill(params_.bucket_count(), 0);
  for (std::uint64_t a = 0; a < n; ++a) {
    bool placed = false;
    for (int d = static_cast<int>(height); d >= 0 && !placed; --d) {
      const std::uint64_t b = params_.bucket_on_path(primary[a], static_cast<unsigned>(d));
      if (fill[b] < params_.capacity_of(b)) {
        owner[params_.slot_base(b) + fill[b]++] = a;
        placed = true;
      } else if (d == static_cast<int>(height)) {
        ++stats.leaf_overflows;
      }
    }
    if (!placed) {
      ++stats.stashed;
      Block p(payload_words_, 0);
      if (!payloads.empty()) std::copy_n(payloads[a].begin(), std::min(payloads[a].size(), p.size()), p.begin());
      stash_.insert({a, primary[a], std::move(p)});
    }
  }

  Block meta_all(words_for_bits(layout_.total_bits()) + 1, 0);
  const unsigned w = layout_.entry_bits();
  for (std::uint64_t s = 0; s < owner.size(); ++s) {
    const std::uint64_t a = owner[s];
    std::fill(slot_buf_.begin(), slot_buf_.end(), 0);
    if (a == kNone) {
      fill_garbage(slot_buf_);
    } else {
      if (!payloads.empty()) std::copy_n(payloads[a].begin(), std::min(payloads[a].size(), payload_words_), slot_buf_.begin());
      set_bits(meta_all, layout_.slot_bit_offset(s), w, encode_meta(BlockMeta::real(a, primary[a]), params_));
    }
    store_->write(data_region_, s, slot_buf_);
  }
  for (std::uint64_t k = 0; k < layout_.block_count(); ++k) {
    std::fill(block_buf_.begin(), block_buf_.end(), 0);
    const std::uint64_t bits = std::min<std::uint64_t>(params_.block_bits, layout_.total_bits() - k * params_.block_bits);
    copy_bits(block_buf_, 0, meta_all, k * params_.block_bits, bits);
    store_->write(meta_region_, k, block_buf_);
  }

  position_table_->load(table);
  if (two) counter_table_->load(counters);
  init_stats_ = stats;
  max_stash_ = stash_.size();
  initialized_ = true;
  return stats;
}

void SuccinctOram::load_meta(std::uint64_t bucket) {
  const auto [first, last] = layout_.bucket_blocks(bucket);
  (void)last;
  meta_block_span_ = meta_window_[params_.depth_of(bucket)];
  meta_first_block_ = std::min(first, layout_.block_count() - meta_block_span_);
  meta_bit_base_ = layout_.slot_bit_offset(params_.slot_base(bucket)) - meta_first_block_ * params_.block_bits;
  meta_buf_.assign(words_for_bits(meta_block_span_ * params_.block_bits) + 1, 0);
  for (std::uint64_t k = 0; k < meta_block_span_; ++k) {
    store_->read(meta_region_, meta_first_block_ + k, block_buf_);
    copy_bits(meta_buf_, k * params_.block_bits, block_buf_, 0, params_.block_bits);
  }
}

void SuccinctOram::store_meta(std::uint64_t /*bucket*/) {
  for (std::uint64_t k = 0; k < meta_block_span_; ++k) {
    std::fill(block_buf_.begin(), block_buf_.end(), 0);
    copy_bits(block_buf_, 0, meta_buf_, k * params_.block_bits, params_.block_bits);
    store_->write(meta_region_, meta_first_block_ + k, block_buf_);
  }
}

std::uint64_t SuccinctOram::meta_entry(std::uint32_t slot) const {
  return get_bits(meta_buf_, meta_bit_base_ + std::uint64_t{slot} * layout_.entry_bits(), layout_.entry_bits());
}

void SuccinctOram::set_meta_entry(std::uint32_t slot, std::uint64_t bits) {
  set_bits(meta_buf_, meta_bit_base_ + std::uint64_t{slot} * layout_.entry_bits(), layout_.entry_bits(), bits);
}

std::optional<Block> SuccinctOram::read_path(std::uint64_t leaf, std::uint64_t addr) {
  std::optional<Block> found;
  const std::uint64_t target = encode_meta(BlockMeta::real(addr, leaf), params_);
  for (unsigned d = 0; d <= params_.height; ++d) {
    const std::uint64_t b = params_.bucket_on_path(leaf, d);
    const std::uint64_t base = params_.slot_base(b);
    const std::uint32_t cap = params_.capacity_of(b);
    load_meta(b);
    for (std::uint32_t j = 0; j < cap; ++j) {
      store_->read(data_region_, base + j, slot_buf_);
      if (meta_entry(j) == target) {
        found = slot_buf_;
        set_meta_entry(j, encode_meta(BlockMeta::dummy(), params_));
        ++holes_[b];
      }
    }
    store_meta(b);
  }
  return found;
}

void SuccinctOram::read_bucket(std::uint64_t leaf, unsigned depth) {
  const std::uint64_t b = params_.bucket_on_path(leaf, depth);
  const std::uint64_t base = params_.slot_base(b);
  const std::uint32_t cap = params_.capacity_of(b);
  load_meta(b);
  for (std::uint32_t j = 0; j < cap; ++j) {
    store_->read(data_region_, base + j, slot_buf_);
    const BlockMeta m = decode_meta(meta_entry(j), params_);
    if (m.is_real()) {
      batch_.push_back({m.addr, m.pos, slot_buf_});
      set_meta_entry(j, encode_meta(BlockMeta::dummy(), params_));
    }
  }
  store_meta(b);
  stash_.insert_batch(batch_);
}

void SuccinctOram::write_bucket(std::uint64_t leaf, unsigned depth) {
  const std::uint64_t b = params_.bucket_on_path(leaf, depth);
  const std::uint64_t base = params_.slot_base(b);
  const std::uint32_t cap = params_.capacity_of(b);
  // Eligible blocks are one contiguous (pos, addr)-ordered run; take its head.
  const auto [first, last] = stash_.prefix_range(leaf, depth, params_.height);
  picked_.clear();
  stash_.extract(first, std::min<std::size_t>(cap, last - first), picked_);

  load_meta(b);
  for (std::uint32_t j = 0; j < cap; ++j) {
    if (j < picked_.size()) {
      store_->write(data_region_, base + j, picked_[j].payload);
      set_meta_entry(j, encode_meta(BlockMeta::real(picked_[j].addr, picked_[j].pos), params_));
    } else {
      fill_garbage(slot_buf_);
      store_->write(data_region_, base + j, slot_buf_);
      set_meta_entry(j, encode_meta(BlockMeta::dummy(), params_));
    }
  }
  store_meta(b);
  holes_[b] = 0;
}

void SuccinctOram::evict_path() {
  const std::uint64_t g = evict_count_;
  evict_count_ = (evict_count_ + 1) & (params_.leaf_count() - 1);
  const std::uint64_t leaf = bit_reversal(g, params_.height);
  for (unsigned d = 0; d <= params_.height; ++d) read_bucket(leaf, d);
  for (int d = static_cast<int>(params_.height); d >= 0; --d) write_bucket(leaf, static_cast<unsigned>(d));
}

Block SuccinctOram::finish_access(std::uint64_t addr, std::uint64_t new_label, Op op, std::span<const Word> new_value,
                                  Block value) {
  Block ret = value;
  if (op == Op::Write) {
    std::fill(value.begin(), value.end(), 0);
    std::copy_n(new_value.begin(), std::min(new_value.size(), value.size()), value.begin());
    mask_tail(value, params_.block_bits);
  }
  stash_.insert({addr, new_label, std::move(value)});
  max_stash_ = std::max(max_stash_, stash_.size());
  evict_path();
  max_stash_ = std::max(max_stash_, stash_.size());
  return ret;
}

Block SuccinctOram::access(std::uint64_t addr, Op op, std::span<const Word> new_value) {
  return params_.construction == Construction::SuccinctTwo ? access_t2(addr, op, new_value)
                                                           : access_t1(addr, op, new_value);
}

Block SuccinctOram::access_t1(std::uint64_t addr, Op op, std::span<const Word> new_value) {
  if (params_.construction != Construction::SuccinctOne) throw std::logic_error("access_t1 on a two-choice instance");
  if (!initialized_) throw std::logic_error("SuccinctOram accessed before init");
  if (addr >= params_.block_count) throw std::out_of_range("SuccinctOram: address out of range");
  store_->mark_epoch();
  ++accesses_;

  const std::uint64_t fresh = rng_.uniform_bits(params_.height);
  const std::uint64_t leaf = position_table_->exchange(addr, fresh);

  std::optional<Block> v = read_path(leaf, addr);
  if (!v) {
    auto entry = stash_.take(addr, leaf);
    if (!entry) throw std::logic_error("integrity error: block " + std::to_string(addr) + " neither on path nor in stash");
    v = std::move(entry->payload);
  }
  return finish_access(addr, fresh, op, new_value, std::move(*v));
}

Block SuccinctOram::access_t2(std::uint64_t addr, Op op, std::span<const Word> new_value) {
  if (params_.construction != Construction::SuccinctTwo) throw std::logic_error("access_t2 on a one-choice instance");
  if (!initialized_) throw std::logic_error("SuccinctOram accessed before init");
  if (addr >= params_.block_count) throw std::out_of_range("SuccinctOram: address out of range");
  store_->mark_epoch();
  ++accesses_;

  const unsigned lw = params_.label_width;
  const std::uint64_t fresh1 = rng_.uniform_bits(params_.height);
  const std::uint64_t fresh2 = rng_.uniform_bits(params_.height);
  const std::uint64_t old = position_table_->exchange(addr, pack_pair(fresh1, fresh2));
  const std::uint64_t l1 = old & low_mask(lw);
  const std::uint64_t l2 = old >> lw;

  std::optional<Block> v1 = read_path(l1, addr);
  std::optional<Block> v2 = read_path(l2, addr);
  Block value;
  std::uint64_t primary = 0;
  if (v1) {
    value = std::move(*v1);
    primary = l1;
  } else if (v2) {
    value = std::move(*v2);
    primary = l2;
  } else {
    auto entry = stash_.take(addr);
    if (!entry) throw std::logic_error("integrity error: block " + std::to_string(addr) + " neither on paths nor in stash");
    value = std::move(entry->payload);
    primary = entry->pos;
  }

  // Decrement before reading the candidates, in listed order.
  counter_table_->add(primary, -1);
  const std::uint64_t c1 = counter_table_->read(fresh1);
  const std::uint64_t c2 = counter_table_->read(fresh2);
  const std::uint64_t chosen = c2 < c1 ? fresh2 : fresh1;
  counter_table_->add(chosen, +1);

  return finish_access(addr, chosen, op, new_value, std::move(value));
}

std::pair<std::uint64_t, std::optional<std::uint64_t>> SuccinctOram::labels(std::uint64_t addr) const {
  const std::uint64_t v = position_table_->peek(addr);
  if (params_.construction == Construction::SuccinctOne) return {v, std::nullopt};
  return {v & low_mask(params_.label_width), v >> params_.label_width};
}

std::vector<BlockMeta> SuccinctOram::peek_bucket_meta(std::uint64_t bucket) const {
  const auto [first, last] = layout_.bucket_blocks(bucket);
  Block buf(words_for_bits((last - first + 1) * params_.block_bits) + 1, 0);
  for (std::uint64_t k = first; k <= last; ++k)
    copy_bits(buf, (k - first) * params_.block_bits, store_->peek(meta_region_, k), 0, params_.block_bits);
  const std::uint64_t bit_base = layout_.slot_bit_offset(params_.slot_base(bucket)) - first * params_.block_bits;
  std::vector<BlockMeta> out(params_.capacity_of(bucket));
  for (std::uint32_t j = 0; j < out.size(); ++j)
    out[j] = decode_meta(get_bits(buf, bit_base + std::uint64_t{j} * layout_.entry_bits(), layout_.entry_bits()), params_);
  return out;
}

std::uint64_t SuccinctOram::primary_label(std::uint64_t addr) const {
  if (const StashEntry* e = stash_.find(addr)) return e->pos;
  const auto [l1, l2] = labels(addr);
  if (!l2) return l1;
  for (std::uint64_t leaf : {l1, *l2}) {
    for (unsigned d = 0; d <= params_.height; ++d) {
      for (const auto& m : peek_bucket_meta(params_.bucket_on_path(leaf, d)))
        if (m.is_real() && m.addr == addr && m.pos == leaf) return leaf;
    }
  }
  throw std::logic_error("primary_label: block " + std::to_string(addr) + " missing");
}

Block SuccinctOram::peek(std::uint64_t addr) const {
  if (const StashEntry* e = stash_.find(addr)) return e->payload;
  const std::uint64_t leaf = primary_label(addr);
  for (unsigned d = 0; d <= params_.height; ++d) {
    const std::uint64_t b = params_.bucket_on_path(leaf, d);
    const auto metas = peek_bucket_meta(b);
    for (std::uint32_t j = 0; j < metas.size(); ++j)
      if (metas[j].is_real() && metas[j].addr == addr) return store_->peek(data_region_, params_.slot_base(b) + j);
  }
  throw std::logic_error("peek: block " + std::to_string(addr) + " missing");
}

AuditResult SuccinctOram::audit() const {
  AuditResult r;
  auto fail = [&](std::string msg) {
    if (r.ok) {
      r.ok = false;
      r.error = std::move(msg);
    }
  };
  const bool two = params_.construction == Construction::SuccinctTwo;
  std::vector<std::uint8_t> seen(params_.block_count, 0);
  std::vector<std::uint64_t> recount(two ? params_.leaf_count() : 0, 0);

  auto check_label = [&](std::uint64_t addr, std::uint64_t pos) {
    const auto [l1, l2] = labels(addr);
    if (!two && pos != l1) fail("block " + std::to_string(addr) + " label disagrees with position table");
    if (two && pos != l1 && pos != *l2) fail("block " + std::to_string(addr) + " primary label not in position table");
    if (two) ++recount[pos];
  };

  for (const auto& e : stash_.entries()) {
    if (e.addr >= params_.block_count) {
      fail("stash entry with invalid address");
      continue;
    }
    if (seen[e.addr]++) fail("block " + std::to_string(e.addr) + " stored twice");
    check_label(e.addr, e.pos);
  }
  for (std::uint64_t b = 0; b < params_.bucket_count(); ++b) {
    const unsigned depth = params_.depth_of(b);
    for (const auto& m : peek_bucket_meta(b)) {
      if (!m.is_real()) continue;
      if (m.addr >= params_.block_count) {
        fail("slot with invalid address");
        continue;
      }
      if (seen[m.addr]++) fail("block " + std::to_string(m.addr) + " stored twice");
      if (params_.bucket_on_path(m.pos, depth) != b)
        fail("block " + std::to_string(m.addr) + " is off the path of its label");
      check_label(m.addr, m.pos);
    }
  }
  for (std::uint64_t a = 0; a < params_.block_count; ++a) {
    if (seen[a]) ++r.real_blocks;
    else fail("block " + std::to_string(a) + " lost");
  }
  if (two) {
    for (std::uint64_t i = 0; i < recount.size(); ++i)
      if (counter_table_->peek(i) != recount[i]) {
        fail("counter table entry " + std::to_string(i) + " disagrees with recount");
        break;
      }
  }
  return r;
}

TreeSnapshot SuccinctOram::snapshot() const {
  TreeSnapshot s;
  s.buckets.resize(params_.bucket_count());
  for (std::uint64_t b = 0; b < params_.bucket_count(); ++b) {
    for (const auto& m : peek_bucket_meta(b))
      if (m.is_real()) s.buckets[b].push_back(m.addr);
    std::sort(s.buckets[b].begin(), s.buckets[b].end());
  }
  s.holes = holes_;
  for (const auto& e : stash_.entries()) s.stash.push_back(e.addr);
  std::sort(s.stash.begin(), s.stash.end());
  return s;
}

std::string SuccinctOram::snapshot_json() const {
  nlohmann::json j;
  j["construction"] = std::string(to_string(params_.construction));
  j["params"] = {{"N", params_.block_count}, {"B", params_.block_bits}, {"L", params_.height},
                 {"Z", params_.bucket_capacity}, {"M", params_.leaf_capacity}};
  j["G"] = evict_count_;
  auto& buckets = j["meta_tree"] = nlohmann::json::array();
  for (std::uint64_t b = 0; b < params_.bucket_count(); ++b) {
    auto arr = nlohmann::json::array();
    for (const auto& m : peek_bucket_meta(b)) {
      if (m.is_real()) arr.push_back({{"type", "real"}, {"addr", m.addr}, {"pos", m.pos}});
      else arr.push_back({{"type", "dummy"}});
    }
    buckets.push_back(std::move(arr));
  }
  auto& stash = j["stash"] = nlohmann::json::array();
  for (const auto& e : stash_.entries()) stash.push_back({{"addr", e.addr}, {"pos", e.pos}});
  auto& pos = j["position_table"] = nlohmann::json::array();
  for (std::uint64_t a = 0; a < params_.block_count; ++a) {
    const auto [l1, l2] = labels(a);
    if (l2) pos.push_back({l1, *l2});
    else pos.push_back(l1);
  }
  if (counter_table_) {
    auto& ctr = j["counter_table"] = nlohmann::json::array();
    for (std::uint64_t i = 0; i < params_.leaf_count(); ++i) ctr.push_back(counter_table_->peek(i));
  }
  return j.dump();
}

}  // namespace soram
