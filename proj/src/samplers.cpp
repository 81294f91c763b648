#include "spikedim/samplers.hpp"

#include <cmath>
#include <string>

#include "spikedim/error.hpp"

namespace spikedim {
namespace {

void check_wishart_args(std::size_t n, std::size_t p, std::size_t d) {
  if (n < 1 || d < 1 || d >= p) {
    throw Error(ErrorKind::InvalidArgument,
                "Wishart cross-block needs n >= 1 and 1 <= d < p");
  }
}

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols,
                                RandomStream& stream) {
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = stream.normal();
  }
  return z;
}

// Returns W_12 scaled by n, i.e. Z_1^T Z_2 (d x (p - d)).
Eigen::MatrixXd cross_block(std::size_t n, std::size_t p, std::size_t d,
                            RandomStream& stream, WishartMethod method) {
  const auto ni = static_cast<Eigen::Index>(n);
  const auto di = static_cast<Eigen::Index>(d);
  const auto qi = static_cast<Eigen::Index>(p - d);
  if (method == WishartMethod::Direct) {
    const Eigen::MatrixXd z = standard_normal(ni, static_cast<Eigen::Index>(p),
                                              stream);
    return z.leftCols(di).transpose() * z.rightCols(qi);
  }
  const Eigen::MatrixXd z1 = standard_normal(ni, di, stream);
  const Eigen::MatrixXd gram = z1.transpose() * z1;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const Eigen::MatrixXd xi = standard_normal(di, qi, stream);
  if (llt.info() != Eigen::Success) {
    // Rank-deficient Z_1 (n < d): fall back to the symmetric square root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    return es.operatorSqrt() * xi;
  }
  return llt.matrixL() * xi;
}

}  // namespace

std::string_view to_string(Family family) {
  return family == Family::Gaussian ? "gaussian" : "laplace";
}

LaplaceMixtureParams LaplaceMixtureParams::from_scale(double b) {
  if (!(b >= 0.0 && 2.0 * b * b < 1.0)) {
    throw Error(ErrorKind::InvalidModel,
                "Laplace scale must satisfy 0 <= b < 1/sqrt(2)");
  }
  return {b, std::sqrt(1.0 - 2.0 * b * b)};
}

LaplaceMixtureParams LaplaceMixtureParams::moment_matched() {
  return from_scale(std::sqrt(std::sqrt(1.5) - 1.0));
}

void SpikedModel::validate() const {
  if (n < 2) throw Error(ErrorKind::InvalidModel, "model needs n >= 2");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw Error(ErrorKind::InvalidModel, "noise variance must be positive");
  }
  if (spikes.size() >= p) {
    throw Error(ErrorKind::InvalidModel,
                "true dimension d = " + std::to_string(spikes.size()) +
                    " must be below p = " + std::to_string(p));
  }
  for (std::size_t j = 0; j < spikes.size(); ++j) {
    if (!std::isfinite(spikes[j]) || !(spikes[j] > noise_var)) {
      throw Error(ErrorKind::InvalidModel,
                  "spike " + std::to_string(j + 1) +
                      " must exceed the noise variance");
    }
    if (j > 0 && spikes[j] > spikes[j - 1]) {
      throw Error(ErrorKind::InvalidModel, "spikes must be non-increasing");
    }
  }
}

double sample_laplace_mixture_scalar(const LaplaceMixtureParams& params,
                                     RandomStream& stream) {
  const double sign = stream.uniform() < 0.5 ? -1.0 : 1.0;
  const double u = stream.uniform() - 0.5;
  const double offset = u < 0.0 ? params.b * std::log1p(2.0 * u)
                                : -params.b * std::log1p(-2.0 * u);
  return sign * params.mu + offset;
}

DataMatrix sample_spiked(const SpikedModel& model, RandomStream& stream) {
  model.validate();
  const auto n = static_cast<Eigen::Index>(model.n);
  const auto p = static_cast<Eigen::Index>(model.p);
  Eigen::VectorXd sd = Eigen::VectorXd::Constant(p, std::sqrt(model.noise_var));
  for (std::size_t j = 0; j < model.spikes.size(); ++j) {
    sd(static_cast<Eigen::Index>(j)) = std::sqrt(model.spikes[j]);
  }

  Eigen::MatrixXd x(n, p);
  if (model.family == Family::Gaussian) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = sd(j) * stream.normal();
    }
  } else {
    const auto params = LaplaceMixtureParams::moment_matched();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        x(i, j) = sd(j) * sample_laplace_mixture_scalar(params, stream);
      }
    }
  }
  return DataMatrix(std::move(x));
}

DataMatrix sample_spiked(const SpikedModel& model, Seed seed) {
  RandomStream stream(seed, 0);
  return sample_spiked(model, stream);
}

double wishart_cross_trace(std::size_t n, std::size_t p, std::size_t d,
                           RandomStream& stream, WishartMethod method) {
  check_wishart_args(n, p, d);
  const Eigen::MatrixXd block = cross_block(n, p, d, stream, method);
  const double nn = static_cast<double>(n);
  return block.squaredNorm() / (nn * nn);
}

double wishart_cross_trace(std::size_t n, std::size_t p, std::size_t d,
                           Seed seed, WishartMethod method) {
  RandomStream stream(seed, 0);
  return wishart_cross_trace(n, p, d, stream, method);
}

double wishart_cross_coordinate(std::size_t n, std::size_t p, std::size_t d,
                                RandomStream& stream, WishartMethod method) {
  check_wishart_args(n, p, d);
  const auto q = static_cast<Eigen::Index>(p - d);
  const double nn = static_cast<double>(n);
  if (method == WishartMethod::Direct) {
    // Only column 1 and the trailing block of Z matter for y_11.
    const Eigen::MatrixXd z = standard_normal(static_cast<Eigen::Index>(n),
                                              q + 1, stream);
    const Eigen::RowVectorXd row = z.col(0).transpose() * z.rightCols(q);
    return row.squaredNorm() / (nn * nn);
  }
  // Row 1 of L Xi is l_11 * xi_1, with l_11^2 = ||z_1||^2.
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = stream.normal();
    norm2 += v * v;
  }
  double chi2 = 0.0;
  for (Eigen::Index k = 0; k < q; ++k) {
    const double v = stream.normal();
    chi2 += v * v;
  }
  return norm2 * chi2 / (nn * nn);
}

}  // namespace spikedim
