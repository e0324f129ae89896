#include "soram/security.hpp"

#include <stdexcept>

namespace soram {

LeafObserver::LeafObserver(const LeafGeometry& g) : geo_(g), read_counts_(g.leaves, 0) {}

void LeafObserver::on_access(Direction d, std::uint64_t addr) {
  if (d != Direction::Read || addr < geo_.first_addr) return;
  const std::uint64_t off = addr - geo_.first_addr;
  if (off >= geo_.leaves * geo_.leaf_slots || off % geo_.leaf_slots != 0) return;
  epoch_.push_back(off / geo_.leaf_slots);
}

void LeafObserver::flush() {
  if (epoch_.empty()) return;
  std::size_t reads = epoch_.size();
  if (geo_.eviction_groups > 0) {
    if (reads < geo_.eviction_groups) throw std::logic_error("LeafObserver: epoch without an eviction");
    reads -= geo_.eviction_groups;
    eviction_leaves_.insert(eviction_leaves_.end(), epoch_.begin() + static_cast<std::ptrdiff_t>(reads), epoch_.end());
  }
  for (std::size_t i = 0; i < reads; ++i) ++read_counts_[epoch_[i]];
  read_total_ += reads;
  epoch_.clear();
}

namespace {

struct RunView {
  std::uint64_t trace_length;
  std::vector<std::uint64_t> evictions;
};

RunView run_one(const InstanceConfig& base, std::uint64_t seed, std::span<const Request> workload,
                std::vector<std::uint64_t>& counts) {
  InstanceConfig ic = base;
  ic.seed = seed;
  ic.trace_mode = TraceMode::CountersOnly;
  OramInstance inst(ic);
  inst.init();
  inst.store().reset_trace();
  LeafObserver obs(inst.leaf_geometry());
  inst.store().set_observer(&obs);
  for (const Request& r : workload) inst.access(r.addr, r.op);
  obs.finish();
  inst.store().set_observer(nullptr);
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += obs.read_leaf_counts()[k];
  return {inst.store().reads() + inst.store().writes(), obs.eviction_leaves()};
}

}  // namespace

SecurityReport security_test(const SecurityConfig& cfg, std::span<const Request> workload_a,
                             std::span<const Request> workload_b) {
  if (workload_a.size() != workload_b.size()) throw std::invalid_argument("security_test: workloads differ in length");
  if (cfg.samples == 0) throw std::invalid_argument("security_test: samples must be positive");
  SecurityReport rep;
  rep.samples = cfg.samples;
  rep.length = workload_a.size();
  const std::uint64_t leaves = cfg.instance.params.leaf_count();
  rep.leaf_counts_a.assign(leaves, 0);
  rep.leaf_counts_b.assign(leaves, 0);

  std::optional<RunView> reference;
  auto compare = [&](const RunView& v) {
    if (!reference) {
      reference = v;
      rep.trace_length = v.trace_length;
      return;
    }
    if (v.trace_length != reference->trace_length) rep.trace_lengths_equal = false;
    if (v.evictions != reference->evictions) rep.eviction_sequences_equal = false;
  };
  for (std::uint32_t s = 0; s < cfg.samples; ++s) {
    compare(run_one(cfg.instance, cfg.base_seed + s, workload_a, rep.leaf_counts_a));
    compare(run_one(cfg.instance, cfg.base_seed + cfg.samples + s, workload_b, rep.leaf_counts_b));
  }
  rep.uniform_a = chi_square_uniform(rep.leaf_counts_a);
  rep.uniform_b = chi_square_uniform(rep.leaf_counts_b);
  rep.homogeneity = chi_square_homogeneity(rep.leaf_counts_a, rep.leaf_counts_b);
  rep.threshold = cfg.alpha / 3.0;
  rep.pass = rep.trace_lengths_equal && rep.eviction_sequences_equal && rep.uniform_a.p_value > rep.threshold &&
             rep.uniform_b.p_value > rep.threshold && rep.homogeneity.p_value > rep.threshold;
  return rep;
}

}  // namespace soram
