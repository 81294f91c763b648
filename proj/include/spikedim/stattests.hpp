// stattests.hpp - subsphericity statistics and their reference distributions.
#pragma once

#include <cstddef>
#include <string_view>

#include "spikedim/eigenmoments.hpp"

namespace spikedim {

/// Statistics for H_0k: the trailing p - k covariance eigenvalues are equal.
///
///   T = m2 / m1^2 - 1                  (trailing moments of S)
///   g = (n - k - 1) T - (p - k)        (approximately N(1, 4) at k = d)
///   z = (g - 1) / 2
struct SubsphericityStat {
  std::size_t k = 0;
  double T = 0.0;
  double g = 0.0;
  double z = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;
};

enum class Regime { FixedP, HighDim };

std::string_view to_string(Regime regime);

struct TestOutcome {
  SubsphericityStat stat;
  Regime regime = Regime::HighDim;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  /// FixedP only: s = n (p - k) T / 2 and its chi-square degrees of freedom.
  double chi_square = 0.0;
  double df = 0.0;
};

/// Requires k < p, n >= k + 2. Throws DegenerateTrailingBlock when the
/// trailing eigenvalues are all zero.
SubsphericityStat statistic(const SpectralSummary& spec, std::size_t k,
                            std::size_t n);

/// Classical fixed-p test: s = n (p - k) T / 2 against chi-square with
/// (p - k)(p - k + 1)/2 - 1 degrees of freedom, upper tail.
TestOutcome chi_square_test(const SubsphericityStat& stat, double alpha);

/// High-dimensional test: two-sided p-value 2 (1 - Phi(|z|)).
TestOutcome high_dim_test(const SubsphericityStat& stat, double alpha);

/// Dispatches on regime.
TestOutcome run_test(const SubsphericityStat& stat, Regime regime,
                     double alpha);

}  // namespace spikedim
