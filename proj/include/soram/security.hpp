#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "soram/instance.hpp"
#include "soram/stats.hpp"
#include "soram/workload.hpp"

namespace soram {

/// Splits the data-region reads of leaf buckets into per-access read-path
/// leaves and eviction leaves.
class LeafObserver final : public TraceObserver {
 public:
  explicit LeafObserver(const LeafGeometry& g);

  void on_access(Direction d, std::uint64_t addr) override;
  void on_epoch() override { flush(); }
  /// Closes the last epoch.
  void finish() { flush(); }

  const std::vector<std::uint64_t>& read_leaf_counts() const { return read_counts_; }
  const std::vector<std::uint64_t>& eviction_leaves() const { return eviction_leaves_; }
  std::uint64_t read_leaves() const { return read_total_; }

 private:
  void flush();

  LeafGeometry geo_;
  std::vector<std::uint64_t> epoch_;
  std::vector<std::uint64_t> read_counts_;
  std::vector<std::uint64_t> eviction_leaves_;
  std::uint64_t read_total_ = 0;
};

struct SecurityConfig {
  InstanceConfig instance;  // seed is replaced per sample
  std::uint32_t samples = 200;
  std::uint64_t base_seed = 1;
  double alpha = 0.01;
};

struct SecurityReport {
  std::uint32_t samples = 0;
  std::uint64_t length = 0;
  bool trace_lengths_equal = true;
  std::uint64_t trace_length = 0;
  bool eviction_sequences_equal = true;
  ChiSquare uniform_a;
  ChiSquare uniform_b;
  ChiSquare homogeneity;
  /// alpha divided by the three simultaneous tests.
  double threshold = 0;
  bool pass = false;
  std::vector<std::uint64_t> leaf_counts_a;
  std::vector<std::uint64_t> leaf_counts_b;
};

/// Runs both workloads on `samples` independently seeded instances each and
/// compares what the server sees.
SecurityReport security_test(const SecurityConfig& cfg, std::span<const Request> workload_a,
                             std::span<const Request> workload_b);

}  // namespace soram
