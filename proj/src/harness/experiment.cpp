#include "soram/experiment.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "soram/rng.hpp"

namespace soram {

namespace {

nlohmann::json params_json(const TreeParams& p) {
  return {{"construction", std::string(to_string(p.construction))},
          {"N", p.block_count},
          {"B", p.block_bits},
          {"Z", p.bucket_capacity},
          {"L", p.height},
          {"M", p.leaf_capacity}};
}

}  // namespace

bool ExperimentResult::ok() const {
  for (const auto& r : reps)
    if (!r.ok()) return false;
  return true;
}

RepetitionResult run_repetition(const ExperimentConfig& cfg, std::uint32_t rep) {
  const auto start = std::chrono::steady_clock::now();
  RepetitionResult r;
  r.rep = rep;
  r.seed = cfg.instance.seed + rep;

  InstanceConfig ic = cfg.instance;
  ic.seed = r.seed;
  const bool keep_trace = rep == 0 && !cfg.trace_path.empty();
  if (keep_trace) ic.trace_mode = TraceMode::Full;
  OramInstance inst(ic);
  const TreeParams& p = inst.params();
  WorkloadSpec ws = cfg.workload;
  ws.seed = cfg.workload.seed + rep;
  const std::vector<Request> workload = make_workload(ws, p.block_count);

  inst.init();
  inst.store().reset_trace();
  const std::size_t words = inst.payload_words();
  std::vector<Block> reference;
  if (cfg.verify) reference.assign(p.block_count, Block(words, 0));
  SplitMix64 values(derive_seed(r.seed, 0x7A1));
  Block value(words, 0);

  const RegionId data = inst.data_region();
  const std::uint64_t expected_bw = bandwidth_blocks(p);
  std::optional<std::uint64_t> server_bw;
  r.max_stash = inst.stash_size();
  if (cfg.record_trajectory) r.stash_trajectory.reserve(workload.size());
  for (std::uint64_t i = 0; i < workload.size(); ++i) {
    const Request& req = workload[i];
    const RegionInfo& dr = inst.store().region(data);
    const std::uint64_t data_before = dr.reads + dr.writes;
    const std::uint64_t all_before = inst.store().reads() + inst.store().writes();
    if (req.op == Op::Write) {
      values.fill(value);
      mask_tail(value, p.block_bits);
    }
    const Block got = inst.access(req.addr, req.op, value);
    const std::uint64_t data_moved = dr.reads + dr.writes - data_before;
    const std::uint64_t all_moved = inst.store().reads() + inst.store().writes() - all_before;
    if (data_moved != expected_bw) r.bandwidth_constant = false;
    if (!server_bw) server_bw = all_moved;
    else if (*server_bw != all_moved) r.bandwidth_constant = false;
    if (cfg.verify) {
      if (got != reference[req.addr]) ++r.mismatches;
      if (req.op == Op::Write) reference[req.addr] = value;
    }
    const std::size_t s = inst.stash_size();
    r.max_stash = std::max<std::uint64_t>(r.max_stash, s);
    if (cfg.record_trajectory) r.stash_trajectory.push_back(static_cast<std::uint32_t>(s));
    if ((i + 1) % p.block_count == 0) r.scan_stash.push_back(static_cast<std::uint32_t>(s));
  }
  r.epochs = workload.size();
  r.final_stash = inst.stash_size();
  r.data_blocks_per_access = expected_bw;
  if (!r.bandwidth_constant) r.data_blocks_per_access = 0;
  r.server_blocks_per_access = server_bw.value_or(0);
  if (cfg.stash_bound && r.max_stash > *cfg.stash_bound) r.stash_bound_exceeded = true;
  if (cfg.audit) {
    const AuditResult a = inst.audit();
    r.audit_ok = a.ok;
    r.audit_error = a.error;
  }
  if (cfg.verify && r.audit_ok) {
    for (std::uint64_t a = 0; a < p.block_count; ++a)
      if (inst.peek(a) != reference[a]) ++r.mismatches;
  }
  if (keep_trace) {
    std::ofstream out(cfg.trace_path);
    if (!out) throw std::runtime_error("cannot write trace file '" + cfg.trace_path + "'");
    const bool jsonl = cfg.trace_path.size() >= 6 && cfg.trace_path.substr(cfg.trace_path.size() - 6) == ".jsonl";
    if (jsonl) inst.store().trace().write_jsonl(out);
    else inst.store().trace().write_csv(out);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ExperimentResult dry_run(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.config = cfg;
  res.space = space_report(cfg.instance.params, SpaceMode::Full, cfg.instance.table_mode, cfg.instance.sub_oram);
  res.closed_form_bandwidth = bandwidth_blocks(cfg.instance.params);
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res = dry_run(cfg);
  for (std::uint32_t rep = 0; rep < cfg.reps; ++rep) res.reps.push_back(run_repetition(cfg, rep));
  return res;
}

std::string config_json(const ExperimentConfig& cfg) {
  nlohmann::json j = params_json(cfg.instance.params);
  j["table_mode"] = std::string(to_string(cfg.instance.table_mode));
  j["seed"] = cfg.instance.seed;
  j["workload"] = std::string(to_string(cfg.workload.kind));
  j["length"] = cfg.workload.length;
  j["reps"] = cfg.reps;
  if (cfg.stash_bound) j["stash_bound"] = *cfg.stash_bound;
  j["notes"] = cfg.notes;
  return j.dump();
}

std::string record_json(const ExperimentResult& result, const RepetitionResult& rep, bool include_trajectory) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_json(result.config));
  j["rep"] = rep.rep;
  j["seed"] = rep.seed;
  j["epochs"] = rep.epochs;
  j["max_stash"] = rep.max_stash;
  j["final_stash"] = rep.final_stash;
  j["scan_stash"] = rep.scan_stash;
  if (include_trajectory) j["stash_trajectory"] = rep.stash_trajectory;
  j["bandwidth_blocks_per_access"] = rep.data_blocks_per_access;
  j["server_blocks_per_access"] = rep.server_blocks_per_access;
  j["bandwidth_constant"] = rep.bandwidth_constant;
  j["mismatches"] = rep.mismatches;
  j["audit_ok"] = rep.audit_ok;
  if (!rep.audit_ok) j["audit_error"] = rep.audit_error;
  j["stash_bound_exceeded"] = rep.stash_bound_exceeded;
  j["space"] = nlohmann::json::parse(to_json(result.space));
  j["wall_seconds"] = rep.wall_seconds;
  j["ok"] = rep.ok();
  return j.dump();
}

const std::vector<Table2Row>& table2_rows() {
  static const std::vector<Table2Row> rows = {
      {"path-rigorous", Construction::PathOram, Setting::Rigorous, 5, 20, 5, 9.0, 210, std::nullopt},
      {"path-aggressive", Construction::PathOram, Setting::Aggressive, 4, 19, 4, 3.0, 160, std::nullopt},
      {"t1-rigorous", Construction::SuccinctOne, Setting::Rigorous, 3, 15, 112, 2.59, 471, 32},
      {"t1-aggressive", Construction::SuccinctOne, Setting::Aggressive, 4, 15, 36, 0.25, 288, std::nullopt},
      {"t2-aggressive", Construction::SuccinctTwo, Setting::Aggressive, 3, 16, 14, 0.0625, 248, std::nullopt},
  };
  return rows;
}

const Table2Row& table2_row(const std::string& name) {
  for (const auto& r : table2_rows())
    if (r.name == name) return r;
  throw ParamError("unknown table row '" + name + "'");
}

namespace {

unsigned shifted_height(unsigned height, std::uint64_t block_count) {
  if (block_count < 2 || (block_count & (block_count - 1)) != 0)
    throw ParamError("table rows need N to be a power of two");
  const int shift = static_cast<int>(std::bit_width(block_count) - 1) - 20;
  const int l = static_cast<int>(height) + shift;
  if (l < 1) throw ParamError("N too small for this row");
  return static_cast<unsigned>(l);
}

}  // namespace

std::vector<Table2Entry> table2(std::uint64_t block_count, std::uint32_t block_bits, double tolerance) {
  std::vector<Table2Entry> out;
  for (const auto& row : table2_rows()) {
    Table2Entry e;
    e.row = row;
    const unsigned l = shifted_height(row.height, block_count);
    e.params = row.construction == Construction::PathOram
                   ? path_oram_params(block_count, block_bits, row.z, l)
                   : make_params(row.construction, block_count, block_bits, row.z, l, row.leaf_capacity);
    const SpaceReport s = space_report(e.params, SpaceMode::Table2);
    e.extra = s.extra_blocks_over_N;
    e.bandwidth = bandwidth_blocks(e.params);
    e.extra_match = std::abs(e.extra - row.published_extra) <= tolerance * row.published_extra;
    e.bandwidth_match = e.bandwidth == row.published_bandwidth;
    out.push_back(e);
  }
  return out;
}

AnalogMapping aggressive_analog(const Table2Row& row, std::uint64_t block_count, std::uint32_t block_bits) {
  AnalogMapping m;
  m.source = row;
  m.f = (std::uint64_t{1} << 20) >> row.height;
  const double f = static_cast<double>(m.f);
  std::ostringstream d;
  d << std::setprecision(6);
  switch (row.construction) {
    case Construction::PathOram: {
      m.params = path_oram_params(block_count, block_bits, row.z, shifted_height(row.height, block_count));
      d << row.name << ": Z=" << row.z << ", L shifted to " << m.params.height;
      break;
    }
    case Construction::SuccinctOne: {
      m.coefficient = (row.leaf_capacity - f) / std::sqrt(f * row.height);
      const unsigned l = height_for(block_count, m.f);
      const double mm = static_cast<double>(block_count >> l) +
                        m.coefficient * std::sqrt(static_cast<double>(block_count) * l / static_cast<double>(std::uint64_t{1} << l));
      m.params = make_params(row.construction, block_count, block_bits, row.z, l,
                             static_cast<std::uint32_t>(ceil_snap(mm)));
      d << row.name << " (N=2^20, L=" << row.height << ", M=" << row.leaf_capacity << ") -> f=" << m.f
        << ", g=" << m.coefficient << " -> N=" << block_count << ", L=" << l << ", M=" << m.params.leaf_capacity;
      break;
    }
    case Construction::SuccinctTwo: {
      m.coefficient = (row.leaf_capacity - f) / std::log2(static_cast<double>(row.height));
      const unsigned l = height_for(block_count, m.f);
      if (l < 2) throw ParamError("N too small for the two-choice analog");
      const double mm = static_cast<double>(block_count >> l) + m.coefficient * std::log2(static_cast<double>(l));
      if (mm <= 0) throw ParamError("two-choice analog gives a non-positive M");
      m.params = make_params(row.construction, block_count, block_bits, row.z, l,
                             static_cast<std::uint32_t>(ceil_snap(mm)));
      d << row.name << " (N=2^20, L=" << row.height << ", M=" << row.leaf_capacity << ") -> f=" << m.f
        << ", 1+eps=" << m.coefficient << " -> N=" << block_count << ", L=" << l << ", M=" << m.params.leaf_capacity;
      break;
    }
  }
  m.description = d.str();
  return m;
}

}  // namespace soram
