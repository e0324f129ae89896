#include "soram/params.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "soram/bits.hpp"

namespace soram {

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::PathOram: return "path";
    case Construction::SuccinctOne: return "t1";
    case Construction::SuccinctTwo: return "t2";
  }
  return "?";
}

Construction construction_from_string(std::string_view s) {
  if (s == "path") return Construction::PathOram;
  if (s == "t1") return Construction::SuccinctOne;
  if (s == "t2") return Construction::SuccinctTwo;
  throw ParamError("unknown construction '" + std::string(s) + "' (expected path, t1 or t2)");
}

unsigned TreeParams::depth_of(std::uint64_t bucket) const {
  return static_cast<unsigned>(std::bit_width(bucket + 1)) - 1;
}

std::uint64_t TreeParams::slot_base(std::uint64_t bucket) const {
  const std::uint64_t internal = internal_bucket_count();
  if (bucket < internal) return bucket * bucket_capacity;
  return internal * bucket_capacity + (bucket - internal) * leaf_capacity;
}

std::uint64_t TreeParams::slot_count() const {
  return internal_bucket_count() * bucket_capacity + leaf_count() * leaf_capacity;
}

bool operator==(const TreeParams& a, const TreeParams& b) {
  return a.n_bits == b.n_bits && a.block_bits == b.block_bits && a.block_count == b.block_count &&
         a.height == b.height && a.leaf_capacity == b.leaf_capacity && a.bucket_capacity == b.bucket_capacity &&
         a.addr_width == b.addr_width && a.label_width == b.label_width && a.construction == b.construction;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParamError(what);
}

TreeParams assemble(Construction c, std::uint64_t n, std::uint32_t b, std::uint32_t z, unsigned l, std::uint32_t m) {
  require(n >= 2, "block_count must be at least 2");
  require(b >= 1, "block_bits must be positive");
  require(z >= 1, "bucket capacity Z must be positive");
  require(m >= 1, "leaf capacity M must be positive");
  require(l >= 1 && l <= 40, "tree height L must be in [1, 40]");
  TreeParams p;
  p.construction = c;
  p.block_count = n;
  p.block_bits = b;
  p.n_bits = n * b;
  p.height = l;
  p.label_width = l;
  p.bucket_capacity = z;
  p.leaf_capacity = m;
  p.addr_width = ceil_log2(n);

  const unsigned n_bits_log = ceil_log2(p.n_bits);
  std::ostringstream msg;
  msg << "block size B=" << b << " is below 3*ceil(lg n)=" << 3 * n_bits_log;
  require(b >= 3 * n_bits_log, msg.str());
  require(1 + p.addr_width + p.label_width <= 64, "metadata word exceeds 64 bits");

  if (c == Construction::PathOram) {
    require(m == z, "Path ORAM requires M == Z");
    require(p.bucket_count() * z >= n, "tree capacity Z(2^(L+1)-1) is smaller than N");
  } else {
    require(p.leaf_count() <= n, "degenerate tree: 2^L exceeds N");
    require(p.slot_count() >= n, "tree capacity Z(2^L-1)+M*2^L is smaller than N");
  }
  return p;
}

}  // namespace

TreeParams make_params(Construction c, std::uint64_t block_count, std::uint32_t block_bits,
                       std::uint32_t bucket_capacity, unsigned height, std::uint32_t leaf_capacity) {
  return assemble(c, block_count, block_bits, bucket_capacity, height, leaf_capacity);
}

unsigned height_for(std::uint64_t block_count, std::uint64_t f_val) {
  unsigned l = 0;
  while ((f_val << l) < block_count) ++l;
  return l;
}

std::uint64_t ceil_snap(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

TreeParams derive_params_t1(std::uint64_t block_count, std::uint64_t f_val, double g_val, std::uint32_t block_bits,
                            std::uint32_t bucket_capacity) {
  require(block_count >= 2, "derive_params_t1: N must be at least 2");
  require(f_val >= 1, "derive_params_t1: f must be positive");
  require(g_val >= 0, "derive_params_t1: g must be non-negative");
  const unsigned l = height_for(block_count, f_val);
  require(l >= 1, "degenerate tree: L = 0 (N/f < 2)");
  const double leaves = std::ldexp(1.0, static_cast<int>(l));
  const double n = static_cast<double>(block_count);
  const double m = n / leaves + g_val * std::sqrt(n * l / leaves);
  return assemble(Construction::SuccinctOne, block_count, block_bits, bucket_capacity, l,
                  static_cast<std::uint32_t>(ceil_snap(m)));
}

TreeParams derive_params_t2(std::uint64_t block_count, std::uint64_t f_val, double eps, std::uint32_t block_bits,
                            std::uint32_t bucket_capacity, std::vector<std::string>* warnings) {
  require(block_count >= 4, "derive_params_t2: N must be at least 4");
  require(f_val >= 1, "derive_params_t2: f must be positive");
  require(eps >= 0, "derive_params_t2: eps must be non-negative");
  const unsigned l = height_for(block_count, f_val);
  require(l >= 2, "derive_params_t2: need L >= 2 (N/f >= 4) so that lg L is defined and positive");
  if (eps == 0 && warnings) warnings->push_back("eps = 0: the two-choice gap bound needs eps > 0");
  const double leaves = std::ldexp(1.0, static_cast<int>(l));
  const double m = static_cast<double>(block_count) / leaves + (1.0 + eps) * std::log2(static_cast<double>(l));
  return assemble(Construction::SuccinctTwo, block_count, block_bits, bucket_capacity, l,
                  static_cast<std::uint32_t>(ceil_snap(m)));
}

TreeParams path_oram_params(std::uint64_t block_count, std::uint32_t block_bits, std::uint32_t bucket_capacity,
                            std::optional<unsigned> height) {
  require(block_count >= 2, "path_oram_params: N must be at least 2");
  const unsigned l = height.value_or(ceil_log2(block_count));
  return assemble(Construction::PathOram, block_count, block_bits, bucket_capacity, l, bucket_capacity);
}

std::uint64_t bit_reversal(std::uint64_t x, unsigned width) {
  std::uint64_t r = 0;
  for (unsigned i = 0; i < width; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace soram
