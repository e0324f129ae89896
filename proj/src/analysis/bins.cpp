#include "soram/bins.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soram/rng.hpp"

namespace soram {

BinsExperiment run_bins(std::uint64_t bins, std::uint64_t balls, unsigned choices, std::uint64_t seed) {
  if (bins == 0 || balls == 0) throw std::invalid_argument("run_bins: bins and balls must be >= 1");
  if (choices != 1 && choices != 2) throw std::invalid_argument("run_bins: choices must be 1 or 2");
  BinsExperiment e{bins, balls, choices, seed, std::vector<std::uint64_t>(bins, 0), 0, 0};
  Rng rng(seed);
  for (std::uint64_t i = 0; i < balls; ++i) {
    std::uint64_t bin = rng.uniform_below(bins);
    if (choices == 2) {
      const std::uint64_t other = rng.uniform_below(bins);
      if (e.loads[other] < e.loads[bin]) bin = other;
    }
    ++e.loads[bin];
  }
  e.max_load = *std::max_element(e.loads.begin(), e.loads.end());
  e.gap = static_cast<double>(e.max_load) - static_cast<double>(balls) / static_cast<double>(bins);
  return e;
}

double one_choice_threshold(std::uint64_t bins, std::uint64_t balls, double g) {
  const double mean = static_cast<double>(balls) / static_cast<double>(bins);
  return mean + g * std::sqrt(mean * std::log2(static_cast<double>(bins)));
}

double two_choice_gap_threshold(std::uint64_t bins, double slack) {
  return std::log2(std::log2(static_cast<double>(bins))) + slack;
}

}  // namespace soram
