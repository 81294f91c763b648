#include "spikedim/harness.hpp"

#include <algorithm>
#include <cmath>

#include "spikedim/error.hpp"

namespace spikedim {

std::string_view to_string(Concentration c) {
  switch (c) {
    case Concentration::Zero: return "gamma=0";
    case Concentration::Proportional: return "gamma=c";
    case Concentration::Infinite: return "gamma=inf";
  }
  return "gamma=0";
}

// Exponent forms of the consistency conditions with p = c n^a, lambda = n^b:
//   p / lambda^2        -> 0  <=>  b > a / 2            (a <= 1)
//   p / (n sqrt(lambda)) -> 0  <=>  b > 2 (a - 1)        (a > 1)
//   p / (sqrt(n) lambda) -> 0  <=>  b > a - 1/2          (a > 1)
double feasibility_boundary(double alpha_exp) {
  if (alpha_exp <= 1.0) return alpha_exp / 2.0;
  return std::max(2.0 * (alpha_exp - 1.0), alpha_exp - 0.5);
}

FeasibilityVerdict feasibility(double alpha_exp, double beta_exp) {
  if (!(alpha_exp >= 0.0) || !std::isfinite(alpha_exp)) {
    throw Error(ErrorKind::InvalidExponent, "dimension exponent must be >= 0");
  }
  if (!(beta_exp > 0.0) || !std::isfinite(beta_exp)) {
    throw Error(ErrorKind::InvalidExponent, "spike exponent must be > 0");
  }
  FeasibilityVerdict v;
  v.beta_min = feasibility_boundary(alpha_exp);
  v.feasible = beta_exp > v.beta_min;
  if (alpha_exp < 1.0) {
    v.regime = Concentration::Zero;
  } else if (alpha_exp == 1.0) {
    v.regime = Concentration::Proportional;
  } else {
    v.regime = Concentration::Infinite;
  }

  if (alpha_exp <= 1.0) {
    v.binding.emplace_back(kCondSpikeVsDim);
  } else {
    const double root_spike = 2.0 * (alpha_exp - 1.0);
    const double root_n = alpha_exp - 0.5;
    if (root_spike >= root_n) v.binding.emplace_back(kCondRootSpike);
    if (root_n >= root_spike) v.binding.emplace_back(kCondRootN);
  }
  return v;
}

}  // namespace spikedim
