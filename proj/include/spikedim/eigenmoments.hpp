// eigenmoments.hpp - sample covariance spectra and trailing eigenvalue moments.
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace spikedim {

/// n x p observation matrix, rows are samples. Construction validates that
/// n >= 2 and every entry is finite.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd values);

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Eigenvalues of a sample covariance matrix, sorted non-increasing.
///
/// Only min(n - 1, p) eigenvalues are stored; when p exceeds that count the
/// remaining p - eigenvalues.size() eigenvalues are exact zeros and every
/// moment computed from the summary includes them.
struct SpectralSummary {
  std::vector<double> eigenvalues;
  std::size_t p = 0;
  std::size_t n = 0;
  bool rank_deficient = false;

  /// Builds a summary from an arbitrary list of eigenvalues (any order).
  /// Values below 1e-10 times the leading eigenvalue are clamped to zero.
  /// Throws InvalidArgument if the list is longer than p or non-finite.
  static SpectralSummary from_eigenvalues(std::vector<double> values,
                                          std::size_t p, std::size_t n);

  /// Eigenvalue j (0-based) of the full length-p spectrum.
  double full(std::size_t j) const {
    return j < eigenvalues.size() ? eigenvalues[j] : 0.0;
  }
};

struct TrailingMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  std::size_t r = 0;
};

/// Spectrum of S = (1/(n-1)) sum_i (x_i - xbar)(x_i - xbar)^T.
///
/// Uses the n x n Gram matrix of centered rows when p > n, the p x p
/// covariance otherwise.
SpectralSummary sample_covariance_spectrum(const DataMatrix& x);

/// Same spectrum, always via the p x p covariance matrix. Kept public as the
/// reference route for the Gram-path equivalence checks.
SpectralSummary sample_covariance_spectrum_direct(const DataMatrix& x);

/// m_{l,r} for l = 1, 2 over the trailing r = p - k eigenvalues of the full
/// length-p spectrum. Throws KOutOfRange unless k < p.
TrailingMoments trailing_moments(const SpectralSummary& spec, std::size_t k);

}  // namespace spikedim
