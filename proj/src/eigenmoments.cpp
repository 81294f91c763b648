#include "spikedim/eigenmoments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "spikedim/error.hpp"

namespace spikedim {
namespace {

constexpr double kClampRelTol = 1e-10;

void clamp_and_sort(std::vector<double>& values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  const double lead = values.empty() ? 0.0 : values.front();
  const double floor = lead > 0.0 ? kClampRelTol * lead : 0.0;
  for (double& v : values) {
    if (v < floor) v = 0.0;
  }
}

Eigen::MatrixXd centered(const DataMatrix& x) {
  const Eigen::RowVectorXd mean = x.values().colwise().mean();
  return x.values().rowwise() - mean;
}

SpectralSummary summarize(const Eigen::VectorXd& raw, std::size_t n,
                          std::size_t p) {
  std::vector<double> values(raw.data(), raw.data() + raw.size());
  std::sort(values.begin(), values.end(), std::greater<>());
  values.resize(std::min(values.size(), std::min(n - 1, p)));
  return SpectralSummary::from_eigenvalues(std::move(values), p, n);
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument,
                "symmetric eigensolver failed to converge");
  }
  return solver.eigenvalues();
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 2) {
    throw Error(ErrorKind::TooFewRows,
                "data matrix needs at least 2 rows, got " +
                    std::to_string(values_.rows()));
  }
  if (values_.cols() < 1) {
    throw Error(ErrorKind::InvalidArgument, "data matrix has no columns");
  }
  if (!values_.allFinite()) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        if (!std::isfinite(values_(i, j))) {
          throw Error(ErrorKind::NonFiniteInput,
                      "non-finite entry at row " + std::to_string(i + 1) +
                          ", column " + std::to_string(j + 1));
        }
      }
    }
  }
}

SpectralSummary SpectralSummary::from_eigenvalues(std::vector<double> values,
                                                  std::size_t p,
                                                  std::size_t n) {
  if (values.size() > p) {
    throw Error(ErrorKind::InvalidArgument,
                "spectrum has more eigenvalues than the dimension p");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFiniteInput, "non-finite eigenvalue");
    }
  }
  clamp_and_sort(values);
  SpectralSummary s;
  s.rank_deficient = values.size() < p;
  s.eigenvalues = std::move(values);
  s.p = p;
  s.n = n;
  return s;
}

SpectralSummary sample_covariance_spectrum(const DataMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (p <= n) return sample_covariance_spectrum_direct(x);

  const Eigen::MatrixXd xc = centered(x);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(xc.rows(), xc.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xc,
                                                  1.0 / static_cast<double>(n - 1));
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return summarize(symmetric_eigenvalues(gram), n, p);
}

SpectralSummary sample_covariance_spectrum_direct(const DataMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const Eigen::MatrixXd xc = centered(x);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(xc.cols(), xc.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose(),
                                                 1.0 / static_cast<double>(n - 1));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return summarize(symmetric_eigenvalues(cov), n, p);
}

TrailingMoments trailing_moments(const SpectralSummary& spec, std::size_t k) {
  if (k >= spec.p) {
    throw Error(ErrorKind::KOutOfRange,
                "k = " + std::to_string(k) + " must be below p = " +
                    std::to_string(spec.p));
  }
  // Sum the stored tail smallest-first; implied zeros contribute nothing.
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t j = spec.eigenvalues.size(); j > k; --j) {
    const double v = spec.eigenvalues[j - 1];
    s1 += v;
    s2 += v * v;
  }
  TrailingMoments tm;
  tm.k = k;
  tm.r = spec.p - k;
  tm.m1 = s1 / static_cast<double>(tm.r);
  tm.m2 = s2 / static_cast<double>(tm.r);
  return tm;
}

}  // namespace spikedim
