#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "soram/bins.hpp"
#include "soram/experiment.hpp"
#include "soram/oracle.hpp"
#include "soram/param_spec.hpp"
#include "soram/security.hpp"

using namespace soram;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct Output {
  std::string out_dir;
  bool summary = false;
  std::ofstream file;

  void open(const std::string& command) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (command + ".jsonl");
    file.open(path);
    if (!file) throw ParamError("out-dir: cannot write " + path.string());
  }
  void record(const json& j) {
    if (!summary) std::cout << j.dump() << '\n';
    if (file) file << j.dump() << '\n';
  }
};

struct ParamFlags {
  ParamSpec spec;
  std::optional<std::uint32_t> z;
  std::optional<unsigned> height;
  std::optional<std::uint64_t> f;
  std::optional<double> g;
  std::optional<double> eps;
  std::string table_mode = "in-memory";
  std::uint32_t sub_z = 5;

  void attach(CLI::App* app) {
    app->add_option("--construction", spec.construction, "path, t1 or t2")->capture_default_str();
    app->add_option("--N", spec.block_count, "number of blocks")->capture_default_str();
    app->add_option("--B", spec.block_bits, "block size in bits")->capture_default_str();
    app->add_option("--Z", z, "internal bucket capacity");
    app->add_option("--L", height, "tree height");
    app->add_option("--M", spec.leaf_capacity, "leaf bucket capacity, or '<M>-analog' / 'analog' for the aggressive row");
    app->add_option("--f", f, "target N / 2^L for derived parameters");
    app->add_option("--g", g, "t1 leaf headroom coefficient");
    app->add_option("--eps", eps, "t2 epsilon");
    app->add_option("--table-mode", table_mode, "in-memory or outsourced")->capture_default_str();
    app->add_option("--sub-z", sub_z, "bucket capacity of table Path ORAMs")->capture_default_str();
  }

  ResolvedParams resolve() {
    spec.z = z;
    spec.height = height;
    spec.f = f;
    spec.g = g;
    spec.eps = eps;
    return resolve_params(spec);
  }

  InstanceConfig instance(const TreeParams& p, std::uint64_t seed) const {
    InstanceConfig ic;
    ic.params = p;
    ic.table_mode = table_mode_from_string(table_mode);
    ic.sub_oram.bucket_capacity = sub_z;
    ic.seed = seed;
    return ic;
  }
};

json params_json(const TreeParams& p) {
  return {{"construction", std::string(to_string(p.construction))},
          {"N", p.block_count},
          {"B", p.block_bits},
          {"Z", p.bucket_capacity},
          {"L", p.height},
          {"M", p.leaf_capacity}};
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& n : notes) std::cerr << "note: " << n << '\n';
}

// ---------------------------------------------------------------- run

struct RunArgs {
  ParamFlags params;
  std::string workload = "scan";
  std::uint64_t length = 0;
  std::uint64_t passes = 1;
  std::uint64_t address = 0;
  std::string trace_file;
  double write_fraction = 0.5;
  std::uint64_t seed = 1;
  std::uint32_t reps = 1;
  std::optional<std::uint64_t> stash_bound;
  bool dry_run = false;
  bool no_verify = false;
  bool no_audit = false;
  bool no_trajectory = false;
  bool encrypt = false;
  std::string trace_out;
};

int cmd_run(RunArgs& a, Output& out) {
  const ResolvedParams rp = a.params.resolve();
  print_notes(rp.notes);
  ExperimentConfig cfg;
  cfg.instance = a.params.instance(rp.params, a.seed);
  cfg.instance.encrypt = a.encrypt;
  cfg.workload.kind = workload_kind_from_string(a.workload);
  cfg.workload.length = a.length;
  if (cfg.workload.kind == WorkloadKind::Scan && a.length == 0) cfg.workload.length = a.passes * rp.params.block_count;
  cfg.workload.seed = a.seed;
  cfg.workload.address = a.address;
  cfg.workload.trace_path = a.trace_file;
  cfg.workload.write_fraction = a.write_fraction;
  cfg.reps = a.reps;
  cfg.stash_bound = a.stash_bound;
  cfg.verify = !a.no_verify;
  cfg.audit = !a.no_audit;
  cfg.record_trajectory = !a.no_trajectory;
  cfg.trace_path = a.trace_out;
  cfg.notes = rp.notes;
  out.open("run");

  if (a.dry_run) {
    const ExperimentResult res = dry_run(cfg);
    const SpaceReport table = space_report(rp.params, SpaceMode::Table2);
    json j{{"experiment", "dry-run-accounting"},
           {"config", json::parse(config_json(cfg))},
           {"bandwidth_blocks_per_access", res.closed_form_bandwidth},
           {"extra_blocks_over_N", table.extra_blocks_over_N},
           {"space", json::parse(to_json(res.space))}};
    out.record(j);
    if (out.summary)
      std::cout << "bandwidth " << res.closed_form_bandwidth << " blocks/access, extra space " << std::fixed
                << std::setprecision(4) << table.extra_blocks_over_N << "N\n";
    return kPass;
  }

  const ExperimentResult res = [&] {
    ExperimentResult r = dry_run(cfg);
    for (std::uint32_t i = 0; i < cfg.reps; ++i) {
      r.reps.push_back(run_repetition(cfg, i));
      out.record(json::parse(record_json(r, r.reps.back(), cfg.record_trajectory)));
    }
    return r;
  }();
  if (out.summary) {
    std::cout << "rep  seed        epochs   max_stash  final_stash  bandwidth  mismatches  audit  wall_s\n";
    for (const auto& r : res.reps)
      std::cout << std::setw(3) << r.rep << "  " << std::setw(10) << r.seed << "  " << std::setw(7) << r.epochs << "  "
                << std::setw(9) << r.max_stash << "  " << std::setw(11) << r.final_stash << "  " << std::setw(9)
                << r.data_blocks_per_access << "  " << std::setw(10) << r.mismatches << "  "
                << (r.audit_ok ? "ok   " : "FAIL ") << "  " << std::fixed << std::setprecision(2) << r.wall_seconds
                << '\n';
  }
  return res.ok() ? kPass : kFail;
}

// ---------------------------------------------------------------- table2

int cmd_table2(std::uint64_t n, std::uint32_t b, double tolerance, Output& out) {
  out.open("table2");
  bool all = true;
  if (out.summary) std::cout << "row              Z   L    M   extra(ours)   extra(pub.)  bw(ours)   bw(pub.)  match\n";
  for (const auto& e : table2(n, b, tolerance)) {
    const bool match = e.extra_match && e.bandwidth_match;
    all = all && match;
    json j{{"experiment", "table2"},
           {"row", e.row.name},
           {"setting", e.row.setting == Setting::Rigorous ? "rigorous" : "aggressive"},
           {"params", params_json(e.params)},
           {"extra_over_N", e.extra},
           {"published_extra_over_N", e.row.published_extra},
           {"extra_match", e.extra_match},
           {"bandwidth", e.bandwidth},
           {"published_bandwidth", e.row.published_bandwidth},
           {"bandwidth_match", e.bandwidth_match}};
    if (e.row.setting == Setting::Aggressive) j["note"] = "no security guarantee";
    out.record(j);
    if (out.summary)
      std::cout << std::left << std::setw(16) << e.row.name << std::right << std::setw(2) << e.params.bucket_capacity
                << std::setw(4) << e.params.height << std::setw(5) << e.params.leaf_capacity << std::setw(13)
                << std::fixed << std::setprecision(4) << e.extra << std::setw(14) << e.row.published_extra << std::setw(10)
                << e.bandwidth << std::setw(11) << e.row.published_bandwidth << "  " << (match ? "MATCH" : "MISMATCH")
                << '\n';
  }
  return all ? kPass : kFail;
}

// ---------------------------------------------------------------- security

struct SecurityArgs {
  ParamFlags params;
  std::uint64_t length = 10000;
  std::uint32_t samples = 200;
  std::uint64_t seed = 1;
  std::string workload_a = "scan";
  std::string workload_b = "single";
  std::uint64_t address = 0;
  double alpha = 0.01;
};

int cmd_security(SecurityArgs& a, Output& out) {
  const ResolvedParams rp = a.params.resolve();
  print_notes(rp.notes);
  out.open("security");
  SecurityConfig cfg;
  cfg.instance = a.params.instance(rp.params, a.seed);
  cfg.samples = a.samples;
  cfg.base_seed = a.seed;
  cfg.alpha = a.alpha;
  WorkloadSpec wa{workload_kind_from_string(a.workload_a), a.length, a.seed, a.address, 0.5, {}};
  WorkloadSpec wb{workload_kind_from_string(a.workload_b), a.length, a.seed + 1, a.address, 0.5, {}};
  const auto reqs_a = make_workload(wa, rp.params.block_count);
  const auto reqs_b = make_workload(wb, rp.params.block_count);
  const SecurityReport r = security_test(cfg, reqs_a, reqs_b);
  json j{{"experiment", "security"},
         {"config", params_json(rp.params)},
         {"workloads", {a.workload_a, a.workload_b}},
         {"length", r.length},
         {"seeds", r.samples},
         {"statistics",
          {{"trace_length", r.trace_length},
           {"trace_lengths_equal", r.trace_lengths_equal},
           {"eviction_sequences_equal", r.eviction_sequences_equal},
           {"uniform_a", {{"chi2", r.uniform_a.statistic}, {"dof", r.uniform_a.dof}, {"p", r.uniform_a.p_value}}},
           {"uniform_b", {{"chi2", r.uniform_b.statistic}, {"dof", r.uniform_b.dof}, {"p", r.uniform_b.p_value}}},
           {"homogeneity",
            {{"chi2", r.homogeneity.statistic}, {"dof", r.homogeneity.dof}, {"p", r.homogeneity.p_value}}},
           {"threshold", r.threshold}}},
         {"pass", r.pass}};
  out.record(j);
  if (out.summary)
    std::cout << "trace lengths equal: " << r.trace_lengths_equal
              << "\neviction sequences equal: " << r.eviction_sequences_equal << "\nuniformity p (a, b): "
              << r.uniform_a.p_value << ", " << r.uniform_b.p_value << "\nhomogeneity p: " << r.homogeneity.p_value
              << "\nthreshold: " << r.threshold << "\nverdict: " << (r.pass ? "PASS" : "FAIL") << '\n';
  return r.pass ? kPass : kFail;
}

// ---------------------------------------------------------------- bins

struct BinsArgs {
  unsigned choices = 2;
  std::uint64_t bins = 16384;
  std::uint64_t balls = 1048576;
  std::uint32_t seeds = 20;
  std::uint64_t seed = 0;
  double g = 4.0;
  double slack = 5.0;
};

int cmd_bins(const BinsArgs& a, Output& out) {
  out.open("bins");
  const double threshold = a.choices == 1 ? one_choice_threshold(a.bins, a.balls, a.g)
                                          : two_choice_gap_threshold(a.bins, a.slack);
  std::uint32_t within = 0;
  double worst_gap = -1e300;
  std::uint64_t worst_load = 0;
  for (std::uint32_t s = 0; s < a.seeds; ++s) {
    const BinsExperiment e = run_bins(a.bins, a.balls, a.choices, a.seed + s);
    const bool ok = a.choices == 1 ? e.max_load <= threshold : e.gap <= threshold;
    within += ok;
    worst_gap = std::max(worst_gap, e.gap);
    worst_load = std::max(worst_load, e.max_load);
    out.record({{"experiment", "bins"},
                {"bins", a.bins},
                {"balls", a.balls},
                {"choices", a.choices},
                {"seed", e.seed},
                {"max_load", e.max_load},
                {"gap", e.gap},
                {"within_threshold", ok}});
  }
  const bool pass = within == a.seeds;
  json summary{{"experiment", "bins-summary"},
               {"config", {{"bins", a.bins}, {"balls", a.balls}, {"choices", a.choices}}},
               {"seeds", a.seeds},
               {"statistics",
                {{"max_load", worst_load},
                 {"max_gap", worst_gap},
                 {"threshold", threshold},
                 {"threshold_on", a.choices == 1 ? "max_load" : "gap"},
                 {"within", within}}},
               {"pass", pass}};
  out.record(summary);
  if (out.summary)
    std::cout << a.choices << " choice(s): worst max load " << worst_load << ", worst gap " << worst_gap
              << ", threshold " << threshold << ", " << within << "/" << a.seeds << " within\n";
  return pass ? kPass : kFail;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  ParamFlags params;
  std::string workload = "scan";
  std::uint64_t length = 0;
  std::uint64_t passes = 1;
  std::uint32_t seeds = 100;
  std::uint64_t seed = 0;
  bool desync = false;
};

int cmd_oracle(OracleArgs& a, Output& out) {
  if (!a.params.f && a.params.spec.leaf_capacity.empty()) {
    a.params.f = 16;
    if (a.params.spec.construction == "t1" && !a.params.g) a.params.g = 1.0;
  }
  const ResolvedParams rp = a.params.resolve();
  print_notes(rp.notes);
  out.open("oracle");
  WorkloadSpec ws{workload_kind_from_string(a.workload), a.length, a.seed, 0, 0.5, {}};
  if (ws.kind == WorkloadKind::Scan && a.length == 0) ws.length = a.passes * rp.params.block_count;
  std::uint32_t equal = 0, g_errors = 0, excess_matches = 0;
  std::uint64_t literal = 0, max_stash = 0;
  for (std::uint32_t s = 0; s < a.seeds; ++s) {
    ws.seed = a.seed + s;
    const auto w = make_workload(ws, rp.params.block_count);
    const OracleVerdict v = run_oracle_pair({rp.params, a.seed + s, a.desync}, w);
    equal += v.equal;
    g_errors += v.g_error;
    literal += v.literal_violations;
    max_stash = std::max(max_stash, v.stash_size);
    const bool excess_holds = static_cast<std::int64_t>(v.stash_size) == std::max<std::int64_t>(0, v.max_excess);
    excess_matches += excess_holds;
    json j{{"experiment", "oracle"},
           {"seed", a.seed + s},
           {"equal", v.equal},
           {"g_error", v.g_error},
           {"stash", v.stash_size},
           {"max_subtree_excess", v.max_excess},
           {"max_subtree_excess_literal", v.max_excess_literal},
           {"literal_violations", v.literal_violations},
           {"stash_equals_excess", excess_holds}};
    if (!v.equal) j["diff"] = v.diff;
    out.record(j);
  }
  const bool pass = equal == a.seeds;
  out.record({{"experiment", "oracle-summary"},
              {"config", params_json(rp.params)},
              {"workload", a.workload},
              {"length", ws.length},
              {"desynchronized", a.desync},
              {"seeds", a.seeds},
              {"statistics",
               {{"equal", equal},
                {"g_errors", g_errors},
                {"literal_violations", literal},
                {"stash_equals_excess", excess_matches},
                {"max_stash", max_stash}}},
              {"pass", pass}});
  if (out.summary)
    std::cout << equal << "/" << a.seeds << " equivalent, " << g_errors << " post-processor errors, " << excess_matches << "/"
              << a.seeds << " stash == max subtree excess\n";
  return pass ? kPass : kFail;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splices `--config FILE` entries in as ordinary flags ahead of the command line.
std::vector<std::string> expand_config(CLI::App& app, int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == "--config") {
      if (i + 1 == in.size()) throw ParamError("--config needs a file");
      path = in[++i];
    } else if (in[i].rfind("--config=", 0) == 0) {
      path = in[i].substr(9);
    } else {
      rest.push_back(in[i]);
    }
  }
  if (path.empty() || rest.empty()) {
    std::reverse(in.begin(), in.end());
    return in;
  }
  CLI::App* sub = nullptr;
  for (CLI::App* s : app.get_subcommands({}))
    if (s->get_name() == rest.front()) sub = s;
  if (!sub) throw ParamError("--config must follow a subcommand");

  std::ifstream file(path);
  if (!file) throw ParamError("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  for (std::size_t lineno = 1; std::getline(file, line); ++lineno) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ParamError(where + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.rfind("--", 0) != 0) key = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(key);
    if (!opt || key == "--config") throw ParamError(where + ": unknown key " + key.substr(2) + " for " + sub->get_name());
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value.empty()) injected.push_back(key);
      else if (value != "false" && value != "0") throw ParamError(where + ": " + key.substr(2) + " expects true or false");
    } else {
      injected.push_back(key);
      injected.push_back(value);
    }
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Succinct tree ORAM simulator and experiment harness"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  Output out;
  if (const char* dir = std::getenv("SORAM_OUT_DIR")) out.out_dir = dir;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", "flat key=value file; command-line flags take precedence");
    sub->add_option("--out-dir", out.out_dir, "also write records to <dir>/<command>.jsonl (default $SORAM_OUT_DIR)");
    sub->add_flag("--summary", out.summary, "print a human-readable table instead of JSON lines");
  };

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "execute a workload and emit one record per repetition");
  common(run_cmd);
  run.params.attach(run_cmd);
  run_cmd->add_option("--workload", run.workload, "scan, uniform, single or trace")->capture_default_str();
  run_cmd->add_option("--len", run.length, "number of requests (scan default: passes * N)");
  run_cmd->add_option("--passes", run.passes, "scan passes when --len is not given")->capture_default_str();
  run_cmd->add_option("--address", run.address, "target of the single-address workload");
  run_cmd->add_option("--trace-file", run.trace_file, "request file for the trace workload");
  run_cmd->add_option("--write-fraction", run.write_fraction, "share of writes in the uniform workload");
  run_cmd->add_option("--seed", run.seed, "base seed; repetition r uses seed + r")->capture_default_str();
  run_cmd->add_option("--reps", run.reps, "repetitions")->capture_default_str();
  run_cmd->add_option("--stash-bound", run.stash_bound, "flag repetitions whose stash exceeds this");
  run_cmd->add_flag("--dry-run-accounting", run.dry_run, "report space and bandwidth without executing accesses");
  run_cmd->add_flag("--no-verify", run.no_verify, "skip the reference-map check");
  run_cmd->add_flag("--no-audit", run.no_audit, "skip the end-of-run structural audit");
  run_cmd->add_flag("--no-trajectory", run.no_trajectory, "omit the per-access stash trajectory");
  run_cmd->add_flag("--encrypt", run.encrypt, "seal server cells");
  run_cmd->add_option("--trace-out", run.trace_out, "write the physical trace of repetition 0 (CSV or .jsonl)");

  std::uint64_t t2_n = std::uint64_t{1} << 20;
  std::uint32_t t2_b = 1024;
  double t2_tol = 0.01;
  auto* table_cmd = app.add_subcommand("table2", "closed-form space and bandwidth next to the published figures");
  common(table_cmd);
  table_cmd->add_option("--N", t2_n, "number of blocks (power of two)")->capture_default_str();
  table_cmd->add_option("--B", t2_b, "block size in bits")->capture_default_str();
  table_cmd->add_option("--tolerance", t2_tol, "relative tolerance on extra space")->capture_default_str();

  SecurityArgs sec;
  sec.params.spec.block_count = 16384;
  auto* sec_cmd = app.add_subcommand("security", "compare server views of two workloads");
  common(sec_cmd);
  sec.params.attach(sec_cmd);
  sec_cmd->add_option("--len", sec.length, "requests per workload")->capture_default_str();
  sec_cmd->add_option("--samples", sec.samples, "seeds per workload")->capture_default_str();
  sec_cmd->add_option("--seed", sec.seed, "base seed")->capture_default_str();
  sec_cmd->add_option("--workload-a", sec.workload_a, "first workload")->capture_default_str();
  sec_cmd->add_option("--workload-b", sec.workload_b, "second workload")->capture_default_str();
  sec_cmd->add_option("--address", sec.address, "target of single-address workloads")->capture_default_str();
  sec_cmd->add_option("--alpha", sec.alpha, "family-wise significance level")->capture_default_str();

  BinsArgs bins;
  auto* bins_cmd = app.add_subcommand("bins", "balls-into-bins simulation");
  common(bins_cmd);
  bins_cmd->add_option("--choices", bins.choices, "1 or 2")->capture_default_str();
  bins_cmd->add_option("--bins", bins.bins)->capture_default_str();
  bins_cmd->add_option("--balls", bins.balls)->capture_default_str();
  bins_cmd->add_option("--seeds", bins.seeds)->capture_default_str();
  bins_cmd->add_option("--seed", bins.seed, "first seed")->capture_default_str();
  bins_cmd->add_option("--g", bins.g, "one-choice threshold coefficient")->capture_default_str();
  bins_cmd->add_option("--slack", bins.slack, "two-choice gap slack over lg lg bins")->capture_default_str();

  OracleArgs orc;
  orc.params.spec.block_count = 1024;
  orc.params.spec.block_bits = 64;
  auto* orc_cmd = app.add_subcommand("oracle", "bounded versus post-processed unbounded-bucket equivalence");
  common(orc_cmd);
  orc.params.attach(orc_cmd);
  orc_cmd->add_option("--workload", orc.workload, "scan, uniform, single or trace")->capture_default_str();
  orc_cmd->add_option("--len", orc.length, "number of requests (scan default: passes * N)");
  orc_cmd->add_option("--passes", orc.passes)->capture_default_str();
  orc_cmd->add_option("--seeds", orc.seeds)->capture_default_str();
  orc_cmd->add_option("--seed", orc.seed, "first seed")->capture_default_str();
  orc_cmd->add_flag("--desync", orc.desync, "negative control: unrelated label tapes");

  std::vector<std::string> args;
  try {
    args = expand_config(app, argc, argv);
  } catch (const ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run, out);
    if (*table_cmd) return cmd_table2(t2_n, t2_b, t2_tol, out);
    if (*sec_cmd) return cmd_security(sec, out);
    if (*bins_cmd) return cmd_bins(bins, out);
    if (*orc_cmd) return cmd_oracle(orc, out);
  } catch (const ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kConfigError;
}
