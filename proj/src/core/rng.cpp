#include "soram/rng.hpp"

#include <bit>

namespace soram {

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n <= 1) return 0;
  const unsigned bits = static_cast<unsigned>(std::bit_width(n - 1));
  for (;;) {
    const std::uint64_t v = uniform_bits(bits);
    if (v < n) return v;
  }
}

}  // namespace soram
