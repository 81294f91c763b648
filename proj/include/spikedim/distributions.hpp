// distributions.hpp - normal and chi-square distribution functions.
#pragma once

namespace spikedim {

/// Standard normal CDF, absolute error ~1e-16 (computed through erfc).
double normal_cdf(double x);

/// Upper tail 1 - Phi(x) without cancellation for large x.
double normal_sf(double x);

/// Inverse of normal_cdf on (0, 1). Acklam's rational approximation followed
/// by one Halley step against erfc.
double normal_quantile(double prob);

/// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
/// Series expansion below x < a + 1, Lentz continued fraction above.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Chi-square CDF and survival function; df > 0, x <= 0 maps to the
/// support boundary.
double chi_square_cdf(double x, double df);
double chi_square_sf(double x, double df);

}  // namespace spikedim
