#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace soram {

enum class Construction { PathOram, SuccinctOne, SuccinctTwo };

std::string_view to_string(Construction c);
Construction construction_from_string(std::string_view s);

/// Raised for parameter sets that violate a precondition.
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shape constants of one tree ORAM instance.
///
/// Buckets are numbered breadth-first from 0 (root). Internal buckets hold
/// `bucket_capacity` (Z) slots, leaf buckets hold `leaf_capacity` (M) slots.
/// Slots are numbered breadth-first too, with all internal slots preceding
/// the leaf slots, so internal addressing does not depend on M.
struct TreeParams {
  std::uint64_t n_bits = 0;
  std::uint32_t block_bits = 0;      // B
  std::uint64_t block_count = 0;     // N
  unsigned height = 0;               // L, leaves = 2^L
  std::uint32_t leaf_capacity = 0;   // M
  std::uint32_t bucket_capacity = 0; // Z
  unsigned addr_width = 0;           // ceil(lg N)
  unsigned label_width = 0;          // L
  Construction construction = Construction::SuccinctOne;

  std::uint64_t leaf_count() const { return std::uint64_t{1} << height; }
  std::uint64_t internal_bucket_count() const { return leaf_count() - 1; }
  std::uint64_t bucket_count() const { return 2 * leaf_count() - 1; }

  unsigned depth_of(std::uint64_t bucket) const;
  bool is_leaf(std::uint64_t bucket) const { return bucket >= internal_bucket_count(); }
  std::uint32_t capacity_of(std::uint64_t bucket) const { return is_leaf(bucket) ? leaf_capacity : bucket_capacity; }
  std::uint32_t capacity_at_depth(unsigned depth) const { return depth == height ? leaf_capacity : bucket_capacity; }

  /// Depth-`depth` bucket on the root-to-`leaf` path: the top `depth` bits of the label pick it.
  std::uint64_t bucket_on_path(std::uint64_t leaf, unsigned depth) const {
    return ((std::uint64_t{1} << depth) - 1) + (leaf >> (height - depth));
  }

  std::uint64_t slot_base(std::uint64_t bucket) const;
  std::uint64_t slot_count() const;  // Z(2^L - 1) + M 2^L

  /// Slots on one root-to-leaf path: Z L + M.
  std::uint64_t path_slots() const { return std::uint64_t{bucket_capacity} * height + leaf_capacity; }
};

bool operator==(const TreeParams& a, const TreeParams& b);

/// Validates and returns a manually specified parameter set.
TreeParams make_params(Construction c, std::uint64_t block_count, std::uint32_t block_bits,
                       std::uint32_t bucket_capacity, unsigned height, std::uint32_t leaf_capacity);

/// L = ceil(lg(N/f)), M = ceil(N/2^L + g sqrt(N L / 2^L)).
TreeParams derive_params_t1(std::uint64_t block_count, std::uint64_t f_val, double g_val,
                            std::uint32_t block_bits = 1024, std::uint32_t bucket_capacity = 3);

/// L = ceil(lg(N/f)), M = ceil(N/2^L + (1+eps) lg L). eps == 0 is accepted with a warning.
TreeParams derive_params_t2(std::uint64_t block_count, std::uint64_t f_val, double eps,
                            std::uint32_t block_bits = 1024, std::uint32_t bucket_capacity = 4,
                            std::vector<std::string>* warnings = nullptr);

/// Uniform-bucket tree; height defaults to ceil(lg N) (leaves padded up to a power of two).
TreeParams path_oram_params(std::uint64_t block_count, std::uint32_t block_bits, std::uint32_t bucket_capacity = 5,
                            std::optional<unsigned> height = std::nullopt);

/// Smallest L with f 2^L >= N.
unsigned height_for(std::uint64_t block_count, std::uint64_t f_val);

/// Reverses the low `width` bits of x.
std::uint64_t bit_reversal(std::uint64_t x, unsigned width);

/// Ceiling of a non-negative real, snapping values within 1e-9 of an integer.
std::uint64_t ceil_snap(double x);

}  // namespace soram
