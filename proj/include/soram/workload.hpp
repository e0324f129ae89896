#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "soram/table.hpp"

namespace soram {

enum class WorkloadKind { Scan, Uniform, SingleAddress, CustomTrace };

std::string_view to_string(WorkloadKind k);
WorkloadKind workload_kind_from_string(std::string_view s);

struct Request {
  std::uint64_t addr = 0;
  Op op = Op::Read;
  bool operator==(const Request&) const = default;
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Scan;
  /// Number of requests; 0 with Scan means one pass over all N addresses.
  std::uint64_t length = 0;
  std::uint64_t seed = 0;
  /// Target of SingleAddress.
  std::uint64_t address = 0;
  /// Share of writes in Uniform.
  double write_fraction = 0.5;
  /// Source file of CustomTrace.
  std::string trace_path;
};

/// Scan issues 0, 1, ..., N-1 (wrapping) as reads; Uniform draws addresses
/// and ops from the seed; SingleAddress repeats one address; CustomTrace
/// reads the file.
std::vector<Request> make_workload(const WorkloadSpec& spec, std::uint64_t block_count);

/// One request per line: "r ADDR", "w ADDR" or a bare address (read).
/// Blank lines and lines starting with '#' are skipped.
std::vector<Request> load_trace_file(const std::string& path, std::uint64_t block_count);

}  // namespace soram
