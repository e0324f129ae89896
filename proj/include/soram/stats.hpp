#pragma once

#include <cstdint>
#include <span>

namespace soram {

struct ChiSquare {
  double statistic = 0;
  double dof = 0;
  double p_value = 1;
};

/// Goodness of fit of `counts` against the uniform distribution over its bins.
ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts);

/// 2 x K homogeneity test of two histograms over the same bins. Bins empty
/// in both are dropped.
ChiSquare chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

}  // namespace soram
