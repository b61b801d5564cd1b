#ifndef EPK_STATS_HPP
#define EPK_STATS_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace epk {

/// Pearson correlation of two equally long vectors.
double pearson(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0,1],
/// by the standard continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

namespace rng {

/// Deterministic helpers layered over mt19937_64 so that every random
/// artifact is reproducible bit-for-bit from its recorded seed. The standard
/// distributions are implementation-defined, so they are not used here.

inline double uniform01(std::mt19937_64& gen) {
  // 53 random bits into [0, 1)
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  // unbiased bounded draw by rejection
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + uniform01(gen) * (hi - lo);
}

/// Fisher-Yates permutation of 0..n-1.
std::vector<int> permutation(std::mt19937_64& gen, int n);

} // namespace rng

} // namespace epk

#endif
