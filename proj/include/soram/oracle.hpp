#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soram/params.hpp"
#include "soram/rng.hpp"
#include "soram/succinct_oram.hpp"
#include "soram/workload.hpp"

namespace soram {

/// The succinct ORAM with every bucket unbounded. Labels are drawn from its
/// own Rng in exactly the order SuccinctOram draws them, so two instances
/// built from the same seed assign the same labels.
class InfiniteOram {
 public:
  InfiniteOram(const TreeParams& params, std::uint64_t seed);

  /// Every block goes to the leaf bucket of its primary label.
  void init();
  void access(std::uint64_t addr);

  const TreeParams& params() const { return params_; }
  const std::vector<std::vector<std::uint64_t>>& buckets() const { return buckets_; }
  const std::vector<std::uint64_t>& stash() const { return stash_; }
  /// Slots emptied by an access since the bucket was last evicted.
  const std::vector<std::uint32_t>& holes() const { return holes_; }
  std::uint64_t primary_label(std::uint64_t addr) const { return label_[addr]; }
  std::uint64_t eviction_counter() const { return evict_count_; }

 private:
  void remove(std::uint64_t addr);
  void evict_path();

  TreeParams params_;
  Rng rng_;
  std::vector<std::vector<std::uint64_t>> buckets_;
  std::vector<std::uint64_t> stash_;
  std::vector<std::uint32_t> holes_;
  std::vector<std::uint64_t> label_;
  std::vector<std::int64_t> where_;  // bucket index, -1 for the stash
  std::vector<std::uint64_t> counters_;
  std::uint64_t evict_count_ = 0;
};

/// Result of post-processing S_inf against S_Z.
struct PostProcessResult {
  bool error = false;
  std::string message;
  /// Pushes out of a bucket left with fewer than capacity blocks (the literal
  /// check); buckets whose shortfall is exactly their read holes are counted
  /// here but are not errors.
  std::uint64_t literal_violations = 0;
  std::vector<std::vector<std::uint64_t>> buckets;  // sorted
  std::vector<std::uint64_t> stash;                 // sorted
};

/// Visits buckets in reverse breadth-first order and pushes every block of
/// S_inf that S_Z holds in a proper ancestor up one level; the root pushes
/// into the stash.
PostProcessResult post_process(const TreeParams& params, const TreeSnapshot& bounded, const InfiniteOram& infinite);

struct OracleConfig {
  TreeParams params;
  std::uint64_t seed = 0;
  /// Negative control: give the infinite instance an unrelated label tape.
  bool desynchronize = false;
};

struct OracleVerdict {
  bool equal = false;
  bool g_error = false;
  std::string diff;
  std::uint64_t literal_violations = 0;
  std::uint64_t accesses = 0;
  std::uint64_t stash_size = 0;
  /// Largest X(T) - (C(T) - holes(T)) over root subtrees of S_inf.
  std::int64_t max_excess = 0;
  /// The same with plain capacities.
  std::int64_t max_excess_literal = 0;
};

/// Runs the bounded and unbounded instances on the same workload, applies
/// post_process and compares buckets (as sets) and stash.
OracleVerdict run_oracle_pair(const OracleConfig& cfg, std::span<const Request> workload);

struct SubtreeUsage {
  std::uint64_t blocks = 0;     // X(T)
  std::uint64_t capacity = 0;   // C(T)
  std::uint64_t holes = 0;
  std::uint64_t nodes = 0;      // n(T)
};

/// X and C of a root-containing connected set of buckets. Throws
/// std::invalid_argument for a malformed subtree.
SubtreeUsage subtree_usage(const InfiniteOram& state, std::span<const std::uint64_t> subtree);

/// max over root subtrees T of X(T) - C(T) + holes(T), by dynamic
/// programming over the tree. An empty `holes` means plain capacities.
std::int64_t max_subtree_excess(const InfiniteOram& state, std::span<const std::uint32_t> holes = {});

/// Calls `visit` with every root-containing subtree (exhaustive; tiny heights only).
void for_each_subtree(unsigned height, const std::function<void(std::span<const std::uint64_t>)>& visit);

/// Random root-containing subtree: each child of an included node is
/// included with probability `keep`.
std::vector<std::uint64_t> sample_subtree(unsigned height, Rng& rng, double keep);

/// The subtree of all internal buckets.
std::vector<std::uint64_t> internal_subtree(unsigned height);

}  // namespace soram
