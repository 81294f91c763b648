// samplers.hpp - data generators for the spiked covariance model and the
// partitioned Wishart cross-block.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "spikedim/eigenmoments.hpp"
#include "spikedim/rng.hpp"

namespace spikedim {

enum class Family { Gaussian, LaplaceMixture };

std::string_view to_string(Family family);

/// Symmetric two-component Laplace mixture (1/2) L(-mu, b) + (1/2) L(mu, b),
/// b the Laplace scale (component variance 2 b^2).
///
/// With mu = sqrt(1 - 2 b^2) the variance is 1 and the fourth moment is
/// 1 + 4v + v^2 for v = 2 b^2, which equals 3 exactly when
/// b^2 = sqrt(3/2) - 1. moment_matched() uses that root, so the mixture
/// shares its first four moments with N(0, 1).
struct LaplaceMixtureParams {
  double b;
  double mu;

  static LaplaceMixtureParams moment_matched();
  /// mu = sqrt(1 - 2 b^2); requires 0 <= b < 1/sqrt(2).
  static LaplaceMixtureParams from_scale(double b);
  double variance() const { return mu * mu + 2.0 * b * b; }
  double fourth_moment() const {
    return mu * mu * mu * mu + 12.0 * mu * mu * b * b + 24.0 * b * b * b * b;
  }
};

/// Diagonal spiked covariance diag(spikes..., noise_var, ..., noise_var).
struct SpikedModel {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> spikes;  // length d, non-increasing, all > noise_var
  double noise_var = 1.0;
  Family family = Family::Gaussian;

  std::size_t d() const { return spikes.size(); }
  /// Throws InvalidModel on any violated invariant.
  void validate() const;
};

/// Draws a sign uniformly, then a Laplace variate around sign * mu by inverse
/// CDF. Consumes exactly two uniforms from the stream.
double sample_laplace_mixture_scalar(const LaplaceMixtureParams& params,
                                     RandomStream& stream);

/// n x p matrix of independent coordinates; column j has variance spikes[j]
/// for j < d and noise_var otherwise. Entries are filled row by row.
DataMatrix sample_spiked(const SpikedModel& model, RandomStream& stream);
DataMatrix sample_spiked(const SpikedModel& model, Seed seed);

/// How the Wishart cross-block is generated.
///  Direct: draw Z (n x p) and form W_12 = Z_1^T Z_2 / n explicitly.
///  Conditional: given Z_1 (n x d), the columns of Z_1^T Z_2 are iid
///    N_d(0, Z_1^T Z_1), so W_12 = L Xi / n with L the Cholesky factor of
///    Z_1^T Z_1 and Xi a d x (p - d) standard normal matrix. Same law, with
///    n d + d (p - d) draws instead of n p.
enum class WishartMethod { Direct, Conditional };

/// tr(W_12 W_21) for W = Z^T Z / n ~ W_p(I/n, n) partitioned at d.
/// Requires 1 <= d < p and n >= 1.
double wishart_cross_trace(std::size_t n, std::size_t p, std::size_t d,
                           RandomStream& stream,
                           WishartMethod method = WishartMethod::Direct);
double wishart_cross_trace(std::size_t n, std::size_t p, std::size_t d,
                           Seed seed,
                           WishartMethod method = WishartMethod::Direct);

/// Single diagonal entry y_11 = (W_12 W_21)_{11}, the per-coordinate
/// cross-trace. Same preconditions and methods as wishart_cross_trace.
double wishart_cross_coordinate(std::size_t n, std::size_t p, std::size_t d,
                                RandomStream& stream,
                                WishartMethod method = WishartMethod::Direct);

}  // namespace spikedim
