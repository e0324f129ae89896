#include "soram/workload.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "soram/params.hpp"
#include "soram/rng.hpp"

namespace soram {

std::string_view to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::Scan: return "scan";
    case WorkloadKind::Uniform: return "uniform";
    case WorkloadKind::SingleAddress: return "single";
    case WorkloadKind::CustomTrace: return "trace";
  }
  return "?";
}

WorkloadKind workload_kind_from_string(std::string_view s) {
  if (s == "scan") return WorkloadKind::Scan;
  if (s == "uniform" || s == "uniform-random") return WorkloadKind::Uniform;
  if (s == "single" || s == "single-address" || s == "hammer") return WorkloadKind::SingleAddress;
  if (s == "trace" || s == "custom" || s == "custom-trace-file") return WorkloadKind::CustomTrace;
  throw ParamError("unknown workload '" + std::string(s) + "' (expected scan, uniform, single or trace)");
}

std::vector<Request> make_workload(const WorkloadSpec& spec, std::uint64_t block_count) {
  if (block_count == 0) throw ParamError("workload: N must be positive");
  std::vector<Request> out;
  switch (spec.kind) {
    case WorkloadKind::Scan: {
      const std::uint64_t len = spec.length == 0 ? block_count : spec.length;
      out.reserve(len);
      for (std::uint64_t i = 0; i < len; ++i) out.push_back({i % block_count, Op::Read});
      break;
    }
    case WorkloadKind::Uniform: {
      if (spec.write_fraction < 0 || spec.write_fraction > 1) throw ParamError("workload: write_fraction must be in [0, 1]");
      Rng rng(derive_seed(spec.seed, 0x3041));
      const std::uint64_t threshold = static_cast<std::uint64_t>(spec.write_fraction * 1048576.0);
      out.reserve(spec.length);
      for (std::uint64_t i = 0; i < spec.length; ++i) {
        const std::uint64_t addr = rng.uniform_below(block_count);
        const bool write = rng.uniform_bits(20) < threshold;
        out.push_back({addr, write ? Op::Write : Op::Read});
      }
      break;
    }
    case WorkloadKind::SingleAddress:
      if (spec.address >= block_count) throw ParamError("workload: address out of range");
      out.assign(spec.length, Request{spec.address, Op::Read});
      break;
    case WorkloadKind::CustomTrace:
      out = load_trace_file(spec.trace_path, block_count);
      if (spec.length != 0 && spec.length < out.size()) out.resize(spec.length);
      break;
  }
  return out;
}

std::vector<Request> load_trace_file(const std::string& path, std::uint64_t block_count) {
  std::ifstream in(path);
  if (!in) throw ParamError("workload: cannot open trace file '" + path + "'");
  std::vector<Request> out;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    Request r;
    std::string addr_text = first;
    if (first == "r" || first == "R" || first == "w" || first == "W") {
      r.op = (first == "w" || first == "W") ? Op::Write : Op::Read;
      if (!(ls >> addr_text)) throw ParamError(path + ":" + std::to_string(lineno) + ": missing address");
    }
    try {
      std::size_t used = 0;
      r.addr = std::stoull(addr_text, &used);
      if (used != addr_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParamError(path + ":" + std::to_string(lineno) + ": bad address '" + addr_text + "'");
    }
    if (r.addr >= block_count) throw ParamError(path + ":" + std::to_string(lineno) + ": address out of range");
    out.push_back(r);
  }
  return out;
}

}  // namespace soram
