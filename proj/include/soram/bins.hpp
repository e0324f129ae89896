#pragma once

#include <cstdint>
#include <vector>

namespace soram {

struct BinsExperiment {
  std::uint64_t bins = 0;
  std::uint64_t balls = 0;
  unsigned choices = 1;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> loads;
  std::uint64_t max_load = 0;
  /// max_load - balls / bins.
  double gap = 0;
};

/// Throws `balls` balls into `bins` bins. With two choices each ball draws
/// two bins and goes to the lesser loaded one; ties go to the first draw.
BinsExperiment run_bins(std::uint64_t bins, std::uint64_t balls, unsigned choices, std::uint64_t seed);

/// mean + g sqrt(mean lg bins): the one-choice alarm threshold.
double one_choice_threshold(std::uint64_t bins, std::uint64_t balls, double g);

/// lg lg bins + slack: the two-choice gap threshold.
double two_choice_gap_threshold(std::uint64_t bins, double slack);

}  // namespace soram
