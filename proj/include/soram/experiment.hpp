#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soram/instance.hpp"
#include "soram/space.hpp"
#include "soram/workload.hpp"

namespace soram {

struct ExperimentConfig {
  InstanceConfig instance;  // seed is the base seed; repetition r uses seed + r
  WorkloadSpec workload;    // seed likewise offset per repetition
  std::uint32_t reps = 1;
  /// Flag repetitions whose stash ever exceeds this many blocks.
  std::optional<std::uint64_t> stash_bound;
  /// Check every read against a plain reference array.
  bool verify = true;
  /// Run the structural audit after each repetition.
  bool audit = true;
  bool record_trajectory = true;
  /// Write the physical trace of repetition 0 here (CSV, or JSON lines for a .jsonl name).
  std::string trace_path;
  /// Free-form labels echoed in the records ("no security guarantee", analog mappings).
  std::vector<std::string> notes;
};

struct RepetitionResult {
  std::uint32_t rep = 0;
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  std::vector<std::uint32_t> stash_trajectory;  // after each access
  std::vector<std::uint32_t> scan_stash;        // after each full pass of N accesses
  std::uint64_t max_stash = 0;
  std::uint64_t final_stash = 0;
  /// Data-tree blocks moved per access (constant when bandwidth_constant).
  std::uint64_t data_blocks_per_access = 0;
  /// All server blocks moved per access, tables and metadata included.
  std::uint64_t server_blocks_per_access = 0;
  bool bandwidth_constant = true;
  std::uint64_t mismatches = 0;
  bool audit_ok = true;
  std::string audit_error;
  bool stash_bound_exceeded = false;
  double wall_seconds = 0;

  /// No integrity invariant fired.
  bool ok() const { return bandwidth_constant && mismatches == 0 && audit_ok; }
};

struct ExperimentResult {
  ExperimentConfig config;
  SpaceReport space;
  std::uint64_t closed_form_bandwidth = 0;
  std::vector<RepetitionResult> reps;
  bool ok() const;
};

RepetitionResult run_repetition(const ExperimentConfig& cfg, std::uint32_t rep);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Space and bandwidth without executing any access.
ExperimentResult dry_run(const ExperimentConfig& cfg);

std::string config_json(const ExperimentConfig& cfg);
/// One JSON object (single line) per repetition.
std::string record_json(const ExperimentResult& result, const RepetitionResult& rep, bool include_trajectory = true);

enum class Setting { Rigorous, Aggressive };

struct Table2Row {
  std::string name;
  Construction construction = Construction::PathOram;
  Setting setting = Setting::Rigorous;
  std::uint32_t z = 0;
  unsigned height = 0;        // at N = 2^20
  std::uint32_t leaf_capacity = 0;
  double published_extra = 0;     // in units of N
  std::uint64_t published_bandwidth = 0;
  std::optional<std::uint32_t> published_stash;
};

/// The rows of the concrete-parameter comparison covered by these constructions.
const std::vector<Table2Row>& table2_rows();

struct Table2Entry {
  Table2Row row;
  TreeParams params;
  double extra = 0;
  std::uint64_t bandwidth = 0;
  bool extra_match = false;
  bool bandwidth_match = false;
};

/// Closed-form extra space and bandwidth for each row; heights shift by
/// lg N - 20 so the ratio N / 2^L is kept.
std::vector<Table2Entry> table2(std::uint64_t block_count = std::uint64_t{1} << 20, std::uint32_t block_bits = 1024,
                                double tolerance = 0.01);

/// A parameter row carried to a smaller N through its own M formula.
struct AnalogMapping {
  Table2Row source;
  std::uint64_t f = 0;             // N / 2^L of the source row
  double coefficient = 0;          // g (one choice) or 1 + eps (two choices)
  TreeParams params;
  std::string description;
};

/// f = 2^20 / 2^L, coefficient solved from the row's M, then L and M recomputed at `block_count`.
AnalogMapping aggressive_analog(const Table2Row& row, std::uint64_t block_count, std::uint32_t block_bits);

/// Row lookup by name (e.g. "t1-aggressive").
const Table2Row& table2_row(const std::string& name);

}  // namespace soram
