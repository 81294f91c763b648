#include "spikedim/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikedim/distributions.hpp"
#include "spikedim/error.hpp"

namespace spikedim {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

std::string_view to_string(Regime regime) {
  return regime == Regime::FixedP ? "fixed-p" : "high-dim";
}

SubsphericityStat statistic(const SpectralSummary& spec, std::size_t k,
                            std::size_t n) {
  if (n < k + 2) {
    throw Error(ErrorKind::KOutOfRange,
                "k = " + std::to_string(k) + " needs n >= k + 2, n = " +
                    std::to_string(n));
  }
  const TrailingMoments tm = trailing_moments(spec, k);
  if (tm.m1 <= 0.0) {
    throw Error(ErrorKind::DegenerateTrailingBlock,
                "trailing eigenvalues beyond k = " + std::to_string(k) +
                    " are all zero");
  }
  SubsphericityStat s;
  s.k = k;
  s.n = n;
  s.p = spec.p;
  s.T = tm.m2 / (tm.m1 * tm.m1) - 1.0;
  s.g = static_cast<double>(n - k - 1) * s.T - static_cast<double>(spec.p - k);
  s.z = (s.g - 1.0) / 2.0;
  return s;
}

TestOutcome chi_square_test(const SubsphericityStat& stat, double alpha) {
  check_alpha(alpha);
  const double r = static_cast<double>(stat.p - stat.k);
  const double df = r * (r + 1.0) / 2.0 - 1.0;
  if (stat.p < stat.k + 2 || df < 1.0) {
    throw Error(ErrorKind::InsufficientDf,
                "chi-square test needs p - k >= 2, got p - k = " +
                    std::to_string(stat.p - stat.k));
  }
  TestOutcome out;
  out.stat = stat;
  out.regime = Regime::FixedP;
  out.alpha = alpha;
  out.df = df;
  out.chi_square = std::max(0.0, static_cast<double>(stat.n) * r * stat.T / 2.0);
  out.p_value = chi_square_sf(out.chi_square, df);
  out.reject = out.p_value < alpha;
  return out;
}

TestOutcome high_dim_test(const SubsphericityStat& stat, double alpha) {
  check_alpha(alpha);
  TestOutcome out;
  out.stat = stat;
  out.regime = Regime::HighDim;
  out.alpha = alpha;
  out.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(stat.z)));
  out.reject = out.p_value < alpha;
  return out;
}

TestOutcome run_test(const SubsphericityStat& stat, Regime regime,
                     double alpha) {
  return regime == Regime::FixedP ? chi_square_test(stat, alpha)
                                  : high_dim_test(stat, alpha);
}

}  // namespace spikedim
