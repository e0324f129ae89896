#include "soram/oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace soram {

namespace {

bool is_proper_ancestor(std::int64_t anc, std::uint64_t node) {
  if (anc < 0) return true;  // the stash sits above the root
  const auto a = static_cast<std::uint64_t>(anc);
  while (node > a) {
    node = (node - 1) / 2;
    if (node == a) return true;
  }
  return false;
}

}  // namespace

InfiniteOram::InfiniteOram(const TreeParams& params, std::uint64_t seed) : params_(params), rng_(seed) {
  if (params_.construction == Construction::PathOram) throw ParamError("InfiniteOram models t1 or t2");
  buckets_.resize(params_.bucket_count());
  holes_.assign(params_.bucket_count(), 0);
  label_.assign(params_.block_count, 0);
  where_.assign(params_.block_count, -1);
  if (params_.construction == Construction::SuccinctTwo) counters_.assign(params_.leaf_count(), 0);
}

void InfiniteOram::init() {
  const unsigned height = params_.height;
  for (std::uint64_t a = 0; a < params_.block_count; ++a) {
    if (params_.construction == Construction::SuccinctOne) {
      label_[a] = rng_.uniform_bits(height);
    } else {
      const std::uint64_t l1 = rng_.uniform_bits(height);
      const std::uint64_t l2 = rng_.uniform_bits(height);
      label_[a] = counters_[l2] < counters_[l1] ? l2 : l1;
      ++counters_[label_[a]];
    }
    const std::uint64_t b = params_.bucket_on_path(label_[a], height);
    buckets_[b].push_back(a);
    where_[a] = static_cast<std::int64_t>(b);
  }
}

void InfiniteOram::remove(std::uint64_t addr) {
  const std::int64_t w = where_[addr];
  auto& from = w < 0 ? stash_ : buckets_[static_cast<std::size_t>(w)];
  const auto it = std::find(from.begin(), from.end(), addr);
  if (it == from.end()) throw std::logic_error("InfiniteOram: location map out of sync");
  *it = from.back();
  from.pop_back();
  if (w >= 0) ++holes_[static_cast<std::size_t>(w)];
  where_[addr] = -1;
}

void InfiniteOram::access(std::uint64_t addr) {
  if (addr >= params_.block_count) throw std::out_of_range("InfiniteOram: address out of range");
  const unsigned height = params_.height;
  if (params_.construction == Construction::SuccinctOne) {
    const std::uint64_t fresh = rng_.uniform_bits(height);
    remove(addr);
    label_[addr] = fresh;
  } else {
    const std::uint64_t f1 = rng_.uniform_bits(height);
    const std::uint64_t f2 = rng_.uniform_bits(height);
    remove(addr);
    --counters_[label_[addr]];
    label_[addr] = counters_[f2] < counters_[f1] ? f2 : f1;
    ++counters_[label_[addr]];
  }
  stash_.push_back(addr);
  evict_path();
}

void InfiniteOram::evict_path() {
  const unsigned height = params_.height;
  const std::uint64_t leaf = bit_reversal(evict_count_, height);
  evict_count_ = (evict_count_ + 1) & (params_.leaf_count() - 1);
  for (unsigned d = 0; d <= height; ++d) {
    auto& b = buckets_[params_.bucket_on_path(leaf, d)];
    stash_.insert(stash_.end(), b.begin(), b.end());
    b.clear();
    holes_[params_.bucket_on_path(leaf, d)] = 0;
  }
  // Unbounded buckets: each block sinks to the deepest bucket shared with its label.
  for (std::uint64_t a : stash_) {
    const unsigned common = height - static_cast<unsigned>(std::bit_width(label_[a] ^ leaf));
    const std::uint64_t b = params_.bucket_on_path(leaf, common);
    buckets_[b].push_back(a);
    where_[a] = static_cast<std::int64_t>(b);
  }
  stash_.clear();
}

PostProcessResult post_process(const TreeParams& params, const TreeSnapshot& bounded, const InfiniteOram& infinite) {
  PostProcessResult r;
  std::vector<std::int64_t> zloc(params.block_count, -2);
  for (std::uint64_t b = 0; b < bounded.buckets.size(); ++b)
    for (std::uint64_t a : bounded.buckets[b]) zloc.at(a) = static_cast<std::int64_t>(b);
  for (std::uint64_t a : bounded.stash) zloc.at(a) = -1;

  r.buckets = infinite.buckets();
  auto fail = [&](std::string msg) {
    r.error = true;
    r.message = std::move(msg);
  };
  for (std::uint64_t i = params.bucket_count(); i-- > 0 && !r.error;) {
    std::vector<std::uint64_t> kept;
    std::uint64_t pushed = 0;
    for (std::uint64_t v : r.buckets[i]) {
      const std::int64_t z = zloc[v];
      if (z == static_cast<std::int64_t>(i)) {
        kept.push_back(v);
      } else if (z != -2 && is_proper_ancestor(z, i)) {
        ++pushed;
        if (i == 0) r.stash.push_back(v);
        else r.buckets[(i - 1) / 2].push_back(v);
      } else {
        fail("block " + std::to_string(v) + " in bucket " + std::to_string(i) +
             " is not in any ancestor of that bucket in the bounded state");
        break;
      }
    }
    r.buckets[i] = std::move(kept);
    if (r.error || pushed == 0) continue;
    const std::uint64_t cap = params.capacity_of(i);
    const std::uint64_t left = r.buckets[i].size();
    if (left < cap) ++r.literal_violations;
    if (left + bounded.holes.at(i) < cap)
      fail("bucket " + std::to_string(i) + " pushed blocks up with " + std::to_string(left) + " left, " +
           std::to_string(bounded.holes.at(i)) + " holes, capacity " + std::to_string(cap));
  }
  for (auto& b : r.buckets) std::sort(b.begin(), b.end());
  std::sort(r.stash.begin(), r.stash.end());
  return r;
}

namespace {

std::string describe(const std::vector<std::uint64_t>& v) {
  std::ostringstream s;
  s << '{';
  for (std::size_t i = 0; i < v.size() && i < 8; ++i) s << (i ? "," : "") << v[i];
  if (v.size() > 8) s << ",...";
  s << '}';
  return s.str();
}

}  // namespace

OracleVerdict run_oracle_pair(const OracleConfig& cfg, std::span<const Request> workload) {
  if (cfg.params.block_count > (std::uint64_t{1} << 12))
    throw ParamError("run_oracle_pair: N must be at most 2^12 so full states can be compared");
  PhysicalStore store(TraceMode::CountersOnly);
  SuccinctOram bounded(SuccinctConfig{cfg.params, TableMode::InMemory, {}, cfg.seed}, store);
  InfiniteOram infinite(cfg.params, cfg.desynchronize ? derive_seed(cfg.seed, 0xDE5) : cfg.seed);
  bounded.init();
  infinite.init();
  for (const Request& req : workload) {
    bounded.access(req.addr, req.op);
    infinite.access(req.addr);
  }

  OracleVerdict v;
  v.accesses = workload.size();
  const TreeSnapshot snap = bounded.snapshot();
  v.stash_size = snap.stash.size();
  v.max_excess = max_subtree_excess(infinite, snap.holes);
  v.max_excess_literal = max_subtree_excess(infinite);
  const PostProcessResult g = post_process(cfg.params, snap, infinite);
  v.literal_violations = g.literal_violations;
  if (g.error) {
    v.g_error = true;
    v.diff = g.message;
    return v;
  }
  std::ostringstream diff;
  std::size_t shown = 0;
  for (std::uint64_t b = 0; b < snap.buckets.size(); ++b) {
    if (snap.buckets[b] == g.buckets[b]) continue;
    if (shown++ < 4)
      diff << "bucket " << b << ": bounded " << describe(snap.buckets[b]) << " vs processed "
           << describe(g.buckets[b]) << "; ";
  }
  if (snap.stash != g.stash) {
    ++shown;
    diff << "stash: bounded " << describe(snap.stash) << " vs processed " << describe(g.stash);
  }
  v.equal = shown == 0;
  v.diff = diff.str();
  return v;
}

SubtreeUsage subtree_usage(const InfiniteOram& state, std::span<const std::uint64_t> subtree) {
  const TreeParams& p = state.params();
  if (subtree.empty()) throw std::invalid_argument("subtree is empty");
  std::vector<std::uint8_t> in(p.bucket_count(), 0);
  for (std::uint64_t b : subtree) {
    if (b >= p.bucket_count()) throw std::invalid_argument("subtree node " + std::to_string(b) + " out of range");
    if (in[b]) throw std::invalid_argument("subtree node " + std::to_string(b) + " listed twice");
    in[b] = 1;
  }
  if (!in[0]) throw std::invalid_argument("subtree does not contain the root");
  SubtreeUsage u;
  for (std::uint64_t b : subtree) {
    if (b != 0 && !in[(b - 1) / 2])
      throw std::invalid_argument("subtree node " + std::to_string(b) + " is not connected to the root");
    u.blocks += state.buckets()[b].size();
    u.capacity += p.capacity_of(b);
    u.holes += state.holes()[b];
    ++u.nodes;
  }
  return u;
}

std::int64_t max_subtree_excess(const InfiniteOram& state, std::span<const std::uint32_t> holes) {
  const TreeParams& p = state.params();
  std::vector<std::int64_t> best(p.bucket_count(), 0);
  for (std::uint64_t b = p.bucket_count(); b-- > 0;) {
    std::int64_t v = static_cast<std::int64_t>(state.buckets()[b].size()) - static_cast<std::int64_t>(p.capacity_of(b));
    if (!holes.empty()) v += holes[b];
    if (!p.is_leaf(b)) v += std::max<std::int64_t>(0, best[2 * b + 1]) + std::max<std::int64_t>(0, best[2 * b + 2]);
    best[b] = v;
  }
  return best[0];
}

void for_each_subtree(unsigned height, const std::function<void(std::span<const std::uint64_t>)>& visit) {
  const std::uint64_t internal = (std::uint64_t{1} << height) - 1;
  std::vector<std::uint64_t> chosen{0};
  // Frontier of nodes whose children have not been decided yet.
  std::function<void(std::vector<std::uint64_t>)> expand = [&](std::vector<std::uint64_t> frontier) {
    if (frontier.empty()) {
      visit(chosen);
      return;
    }
    const std::uint64_t node = frontier.back();
    frontier.pop_back();
    if (node >= internal) {
      expand(std::move(frontier));
      return;
    }
    for (unsigned mask = 0; mask < 4; ++mask) {
      auto next = frontier;
      const std::size_t mark = chosen.size();
      for (unsigned c = 0; c < 2; ++c) {
        if (mask & (1u << c)) {
          chosen.push_back(2 * node + 1 + c);
          next.push_back(2 * node + 1 + c);
        }
      }
      expand(std::move(next));
      chosen.resize(mark);
    }
  };
  expand({0});
}

std::vector<std::uint64_t> sample_subtree(unsigned height, Rng& rng, double keep) {
  const std::uint64_t internal = (std::uint64_t{1} << height) - 1;
  const auto threshold = static_cast<std::uint64_t>(keep * 1048576.0);
  std::vector<std::uint64_t> out{0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint64_t node = out[i];
    if (node >= internal) continue;
    for (std::uint64_t c = 2 * node + 1; c <= 2 * node + 2; ++c)
      if (rng.uniform_bits(20) < threshold) out.push_back(c);
  }
  return out;
}

std::vector<std::uint64_t> internal_subtree(unsigned height) {
  std::vector<std::uint64_t> out((std::uint64_t{1} << height) - 1);
  for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

}  // namespace soram
