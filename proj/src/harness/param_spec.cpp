#include "soram/param_spec.hpp"

#include "soram/experiment.hpp"

namespace soram {

namespace {

constexpr const char* kNoGuarantee = "no security guarantee: aggressive parameters";

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::uint32_t parse_count(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used == text.size() && v > 0 && v <= 0xFFFFFFFFull) return static_cast<std::uint32_t>(v);
  } catch (const std::exception&) {
  }
  throw ParamError(field + ": expected a positive integer, got '" + text + "'");
}

}  // namespace

ResolvedParams resolve_params(const ParamSpec& spec) {
  const Construction c = construction_from_string(spec.construction);
  const std::uint64_t n = spec.block_count;
  const std::uint32_t b = spec.block_bits;
  ResolvedParams r;

  const bool analog = spec.leaf_capacity == "analog" || ends_with(spec.leaf_capacity, "-analog");
  if (analog) {
    const std::string row = std::string(to_string(c)) + "-aggressive";
    const AnalogMapping m = aggressive_analog(table2_row(row), n, b);
    if (ends_with(spec.leaf_capacity, "-analog")) {
      const std::string named = spec.leaf_capacity.substr(0, spec.leaf_capacity.size() - 7);
      if (parse_count("M", named) != m.source.leaf_capacity)
        throw ParamError("M: '" + spec.leaf_capacity + "' does not name the " + row + " row (M=" +
                         std::to_string(m.source.leaf_capacity) + ")");
    }
    if (spec.z && *spec.z != m.params.bucket_capacity)
      throw ParamError("Z: the " + row + " analog uses Z=" + std::to_string(m.params.bucket_capacity));
    if (spec.height && *spec.height != m.params.height)
      throw ParamError("L: the " + row + " analog at N=" + std::to_string(n) + " has L=" +
                       std::to_string(m.params.height));
    r.params = m.params;
    r.aggressive = true;
    r.notes = {kNoGuarantee, "analog: " + m.description};
    return r;
  }

  if (c == Construction::PathOram) {
    if (!spec.leaf_capacity.empty()) throw ParamError("M: Path ORAM has uniform buckets; give Z only");
    r.params = path_oram_params(n, b, spec.z.value_or(5), spec.height);
    return r;
  }

  if (!spec.leaf_capacity.empty()) {
    if (!spec.z || !spec.height) throw ParamError("manual parameters need Z, L and M together");
    if (spec.f || spec.g || spec.eps) throw ParamError("give either (Z, L, M) or derivation inputs, not both");
    r.params = make_params(c, n, b, *spec.z, *spec.height, parse_count("M", spec.leaf_capacity));
    return r;
  }
  if (spec.height) throw ParamError("L: derived parameters compute L from f; give M as well for manual parameters");
  if (c == Construction::SuccinctOne) {
    if (spec.eps) throw ParamError("eps: applies to t2 only");
    r.params = derive_params_t1(n, spec.f.value_or(32), spec.g.value_or(4.0), b, spec.z.value_or(3));
  } else {
    if (spec.g) throw ParamError("g: applies to t1 only");
    std::vector<std::string> warnings;
    r.params = derive_params_t2(n, spec.f.value_or(16), spec.eps.value_or(1.0), b, spec.z.value_or(4), &warnings);
    r.notes = warnings;
  }
  return r;
}

}  // namespace soram
