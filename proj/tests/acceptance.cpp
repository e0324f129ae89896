#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "soram/bins.hpp"
#include "soram/bits.hpp"
#include "soram/experiment.hpp"
#include "soram/meta.hpp"
#include "soram/oracle.hpp"
#include "soram/rng.hpp"
#include "soram/security.hpp"

using namespace soram;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome table_arithmetic() {
  const auto start = Clock::now();
  const auto entries = table2(std::uint64_t{1} << 20, 1024, 0.01);
  const double elapsed = seconds_since(start);
  bool all = entries.size() == 5;
  std::ostringstream d;
  for (const auto& e : entries) {
    const bool ok = e.extra_match && e.bandwidth_match;
    all = all && ok;
    d << e.row.name << " " << fmt("%.4f", e.extra) << "N/" << e.bandwidth << (ok ? "" : " (mismatch)") << "; ";
  }
  d << "runtime " << fmt("%.4f", elapsed) << "s";
  return {all && elapsed < 1.0, d.str()};
}

Outcome correctness() {
  constexpr std::uint64_t n = std::uint64_t{1} << 14;
  constexpr std::uint32_t b = 128;
  const std::vector<TreeParams> params{path_oram_params(n, b, 5), derive_params_t1(n, 32, 4.0, b, 3),
                                       derive_params_t2(n, 16, 1.0, b, 4)};
  bool all = true;
  std::ostringstream d;
  for (const auto& p : params) {
    for (TableMode mode : {TableMode::InMemory, TableMode::Outsourced}) {
      ExperimentConfig cfg;
      cfg.instance.params = p;
      cfg.instance.table_mode = mode;
      cfg.instance.seed = 2024;
      cfg.workload.kind = WorkloadKind::Uniform;
      cfg.workload.length = 100000;
      cfg.workload.seed = 77;
      cfg.record_trajectory = false;
      const RepetitionResult r = run_repetition(cfg, 0);
      all = all && r.ok() && r.epochs == 100000;
      d << to_string(p.construction) << "/" << to_string(mode) << " mismatches " << r.mismatches
        << (r.audit_ok ? "" : " audit failed") << (r.bandwidth_constant ? "" : " bandwidth varied") << " "
        << fmt("%.1f", r.wall_seconds) << "s; ";
    }
  }
  return {all, d.str()};
}

Outcome oracle_equivalence() {
  constexpr std::uint64_t n = 1024;
  constexpr std::uint32_t seeds = 100;
  const std::vector<TreeParams> params{make_params(Construction::SuccinctOne, n, 64, 2, 6, 16),
                                       make_params(Construction::SuccinctTwo, n, 64, 1, 7, 8)};
  bool all = true;
  std::ostringstream d;
  for (const auto& p : params) {
    const auto scan = make_workload({WorkloadKind::Scan, 2 * n, 0, 0, 0.5, {}}, n);
    std::uint32_t equal = 0;
    std::uint64_t max_stash = 0;
    for (std::uint32_t s = 0; s < seeds; ++s) {
      const OracleVerdict v = run_oracle_pair({p, s, false}, scan);
      equal += v.equal;
      max_stash = std::max(max_stash, v.stash_size);
    }
    std::uint32_t control_equal = 0;
    for (std::uint32_t s = 0; s < 10; ++s) control_equal += run_oracle_pair({p, s, true}, scan).equal;
    all = all && equal == seeds && control_equal == 0;
    d << to_string(p.construction) << "(Z=" << p.bucket_capacity << ",L=" << p.height << ",M=" << p.leaf_capacity
      << ") " << equal << "/" << seeds << " equal, max stash " << max_stash << ", desynchronized control "
      << control_equal << "/10 equal; ";
  }
  return {all, d.str()};
}

Outcome obliviousness() {
  constexpr std::uint64_t n = std::uint64_t{1} << 14;
  constexpr std::uint64_t length = 10000;
  constexpr double alpha = 0.01;
  const std::vector<TreeParams> params{derive_params_t1(n, 32, 2.0, 128, 3), derive_params_t2(n, 16, 1.0, 128, 4)};
  const auto scan = make_workload({WorkloadKind::Scan, length, 0, 0, 0.5, {}}, n);
  const auto hammer = make_workload({WorkloadKind::SingleAddress, length, 0, 0, 0.5, {}}, n);
  bool all = true;
  std::ostringstream d;
  for (const auto& p : params) {
    SecurityConfig cfg;
    cfg.instance.params = p;
    cfg.samples = 200;
    cfg.base_seed = 1;
    cfg.alpha = alpha;
    const SecurityReport r = security_test(cfg, scan, hammer);
    // Bonferroni over the two uniformity tests; the two-sample test at alpha.
    const bool uniform = r.uniform_a.p_value > alpha / 2 && r.uniform_b.p_value > alpha / 2;
    const bool homogeneous = r.homogeneity.p_value > alpha;
    const bool ok = r.trace_lengths_equal && r.eviction_sequences_equal && uniform && homogeneous;
    all = all && ok;
    d << to_string(p.construction) << "(L=" << p.height << ",M=" << p.leaf_capacity << ") lengths "
      << (r.trace_lengths_equal ? "equal" : "differ") << ", eviction leaves "
      << (r.eviction_sequences_equal ? "equal" : "differ") << ", uniformity p " << fmt("%.3f", r.uniform_a.p_value)
      << "/" << fmt("%.3f", r.uniform_b.p_value) << ", homogeneity p " << fmt("%.3f", r.homogeneity.p_value)
      << "; ";
  }
  return {all, d.str()};
}

struct ScanSummary {
  std::uint32_t within_bound = 0;
  std::uint32_t empty_after_scans = 0;
  std::uint64_t worst = 0;
  bool integrity = true;
};

ScanSummary scan_runs(const TreeParams& p, std::uint32_t seeds, std::uint64_t bound) {
  ExperimentConfig cfg;
  cfg.instance.params = p;
  cfg.instance.seed = 500;
  cfg.workload.kind = WorkloadKind::Scan;
  cfg.workload.length = 10 * p.block_count;
  cfg.record_trajectory = false;
  ScanSummary s;
  for (std::uint32_t rep = 0; rep < seeds; ++rep) {
    const RepetitionResult r = run_repetition(cfg, rep);
    s.integrity = s.integrity && r.ok();
    s.worst = std::max(s.worst, r.max_stash);
    s.within_bound += r.max_stash <= bound;
    s.empty_after_scans += std::all_of(r.scan_stash.begin(), r.scan_stash.end(), [](auto v) { return v == 0; });
  }
  return s;
}

Outcome stash_behaviour() {
  constexpr std::uint64_t n = std::uint64_t{1} << 16;
  constexpr std::uint32_t seeds = 20;
  std::ostringstream d;
  const TreeParams rigorous = derive_params_t1(n, 32, 4.0, 128, 3);
  const ScanSummary r = scan_runs(rigorous, seeds, 32);
  const bool rigorous_ok = r.integrity && r.within_bound * 100 >= 95 * seeds;
  d << "t1 rigorous (L=" << rigorous.height << ",M=" << rigorous.leaf_capacity << ") max stash <= 32 in "
    << r.within_bound << "/" << seeds << " seeds, worst " << r.worst << "; ";
  bool analogs_ok = true;
  for (const char* row : {"t1-aggressive", "t2-aggressive"}) {
    const AnalogMapping a = aggressive_analog(table2_row(row), n, 128);
    const ScanSummary s = scan_runs(a.params, seeds, 0);
    analogs_ok = analogs_ok && s.integrity && 2 * s.empty_after_scans > seeds;
    d << row << " analog (Z=" << a.params.bucket_capacity << ",L=" << a.params.height << ",M="
      << a.params.leaf_capacity << ") empty after every scan in " << s.empty_after_scans << "/" << seeds
      << " seeds, worst " << s.worst << "; ";
  }
  return {rigorous_ok && analogs_ok, d.str()};
}

Outcome balls_into_bins() {
  constexpr std::uint64_t bins = std::uint64_t{1} << 14;
  constexpr std::uint64_t balls = std::uint64_t{1} << 20;
  constexpr std::uint32_t seeds = 20;
  const double load_threshold = one_choice_threshold(bins, balls, 4.0);
  const double gap_threshold = two_choice_gap_threshold(bins, 5.0);
  std::uint32_t one_ok = 0, two_ok = 0;
  std::uint64_t worst_load = 0;
  double worst_gap = 0;
  for (std::uint32_t s = 0; s < seeds; ++s) {
    const BinsExperiment one = run_bins(bins, balls, 1, s);
    const BinsExperiment two = run_bins(bins, balls, 2, s);
    one_ok += one.max_load <= load_threshold;
    two_ok += two.gap <= gap_threshold;
    worst_load = std::max(worst_load, one.max_load);
    worst_gap = std::max(worst_gap, two.gap);
  }
  std::ostringstream d;
  d << "one choice worst max load " << worst_load << " vs " << fmt("%.2f", load_threshold) << " (" << one_ok << "/"
    << seeds << "); two choices worst gap " << fmt("%.0f", worst_gap) << " vs " << fmt("%.2f", gap_threshold) << " ("
    << two_ok << "/" << seeds << ")";
  return {one_ok == seeds && two_ok == seeds, d.str()};
}

Outcome structural_invariants() {
  std::ostringstream d;
  bool all = true;

  std::uint32_t audits = 0, audit_failures = 0;
  constexpr std::uint64_t n = 1024;
  const std::vector<TreeParams> params{path_oram_params(n, 64, 4), make_params(Construction::SuccinctOne, n, 64, 2, 6, 16),
                                       make_params(Construction::SuccinctTwo, n, 64, 1, 7, 8)};
  for (const auto& p : params) {
    for (TableMode mode : {TableMode::InMemory, TableMode::Outsourced}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        InstanceConfig ic;
        ic.params = p;
        ic.table_mode = mode;
        ic.seed = seed;
        OramInstance inst(ic);
        inst.init();
        const auto work = make_workload({WorkloadKind::Uniform, 4000, seed, 0, 0.5, {}}, n);
        const Block value(inst.payload_words(), 0x5A5A);
        for (std::size_t i = 0; i < work.size(); ++i) {
          inst.access(work[i].addr, work[i].op, value);
          if (i % 500 == 499) {
            const AuditResult a = inst.audit();
            ++audits;
            if (!a.ok || a.real_blocks != n) ++audit_failures;
          }
        }
      }
    }
  }
  all = all && audit_failures == 0;
  d << "containment and counter audits " << audits - audit_failures << "/" << audits << "; ";

  Rng rng(99);
  std::uint32_t meta_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const unsigned height = 1 + static_cast<unsigned>(rng.uniform_below(20));
    const std::uint64_t count = (std::uint64_t{1} << height) + rng.uniform_below(4096);
    const TreeParams p = make_params(Construction::SuccinctOne, count, 256, 3, height,
                                     8 + static_cast<std::uint32_t>(count >> height));
    const BlockMeta m = BlockMeta::real(rng.uniform_below(count), rng.uniform_bits(height));
    meta_failures += !(decode_meta(encode_meta(m, p), p) == m);
  }
  all = all && meta_failures == 0;
  d << "metadata round trips " << 10000 - meta_failures << "/10000; ";

  std::uint32_t windows = 0, unfair = 0;
  for (unsigned height = 1; height <= 12; ++height) {
    const std::uint64_t leaves = std::uint64_t{1} << height;
    for (unsigned depth = 0; depth <= height; ++depth) {
      const std::uint64_t period = std::uint64_t{1} << depth;
      for (std::uint64_t start : {std::uint64_t{0}, std::uint64_t{1}, leaves / 2 + 3, 3 * leaves - 1}) {
        std::set<std::uint64_t> nodes;
        for (std::uint64_t g = start; g < start + period; ++g)
          nodes.insert(bit_reversal(g % leaves, height) >> (height - depth));
        ++windows;
        unfair += nodes.size() != period;
      }
    }
  }
  all = all && unfair == 0;
  d << "eviction period windows " << windows - unfair << "/" << windows << "; ";

  std::uint32_t involution_failures = 0;
  for (unsigned width = 1; width <= 24; ++width)
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t x = rng.uniform_bits(width);
      involution_failures += bit_reversal(bit_reversal(x, width), width) != x;
    }
  all = all && involution_failures == 0;
  d << "bit-reversal involution failures " << involution_failures;
  return {all, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"table arithmetic", table_arithmetic},
      {"reference-map correctness", correctness},
      {"oracle equivalence", oracle_equivalence},
      {"obliviousness", obliviousness},
      {"stash under scans", stash_behaviour},
      {"balls into bins", balls_into_bins},
      {"structural invariants", structural_invariants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
