#include "soram/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <stdexcept>

namespace soram {

double chi_square_sf(double statistic, double dof) {
  if (dof <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: need at least two bins");
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  ChiSquare r;
  r.dof = static_cast<double>(counts.size() - 1);
  if (total == 0) return r;
  const double expected = total / static_cast<double>(counts.size());
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

ChiSquare chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_homogeneity: histograms differ in size");
  double ta = 0, tb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ta += static_cast<double>(a[k]);
    tb += static_cast<double>(b[k]);
  }
  ChiSquare r;
  if (ta == 0 || tb == 0) return r;
  const double total = ta + tb;
  std::size_t used = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double col = static_cast<double>(a[k] + b[k]);
    if (col == 0) continue;
    ++used;
    const double ea = col * ta / total;
    const double eb = col * tb / total;
    const double da = static_cast<double>(a[k]) - ea;
    const double db = static_cast<double>(b[k]) - eb;
    r.statistic += da * da / ea + db * db / eb;
  }
  r.dof = used > 0 ? static_cast<double>(used - 1) : 0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

}  // namespace soram
