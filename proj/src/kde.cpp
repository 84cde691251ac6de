#include "dsvgd/kde.hpp"

#include "dsvgd/kernel.hpp"

#include <cmath>

namespace dsvgd {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

}  // namespace

GaussianKde::GaussianKde(Matrix centers, double lambda)
    : centers_(std::move(centers)), lambda_(lambda) {
  if (centers_.rows() < 1 || centers_.cols() < 1) {
    throw std::invalid_argument("GaussianKde: need at least one center");
  }
  if (!centers_.allFinite()) {
    throw std::invalid_argument("GaussianKde: centers contain non-finite entries");
  }
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("GaussianKde: lambda must be positive and finite");
  }
}

Vector GaussianKde::log_density_rows(const Matrix& points) const {
  if (points.cols() != centers_.cols()) {
    throw std::invalid_argument("GaussianKde: query dimension mismatch");
  }
  const double var = lambda_ * lambda_;
  const double d = static_cast<double>(centers_.cols());
  const double log_norm =
      -0.5 * d * (kLogTwoPi + 2.0 * std::log(lambda_)) - std::log(static_cast<double>(centers_.rows()));

  const Matrix logw = -pairwise_sq_dists(points, centers_) / (2.0 * var);
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) {
    const double mx = logw.row(i).maxCoeff();
    const double lse = mx + std::log((logw.row(i).array() - mx).exp().sum());
    out[i] = log_norm + lse;
  }
  return out;
}

double GaussianKde::log_density(const Vector& theta) const {
  return log_density_rows(theta.transpose())[0];
}

Matrix GaussianKde::score_rows(const Matrix& points) const {
  if (points.cols() != centers_.cols()) {
    throw std::invalid_argument("GaussianKde: query dimension mismatch");
  }
  const double var = lambda_ * lambda_;
  Matrix logw = -pairwise_sq_dists(points, centers_) / (2.0 * var);
  for (Index i = 0; i < logw.rows(); ++i) {
    const double mx = logw.row(i).maxCoeff();
    Eigen::ArrayXd w = (logw.row(i).array() - mx).exp();
    logw.row(i) = (w / w.sum()).matrix();
  }
  return (logw * centers_ - points) / var;
}

Vector GaussianKde::score(const Vector& theta) const {
  return score_rows(theta.transpose()).row(0).transpose();
}

Vector kde_score(const Vector& theta, const ParticleSet& particles, double lambda) {
  return GaussianKde(particles.positions(), lambda).score(theta);
}

double kde_log_density(const Vector& theta, const ParticleSet& particles, double lambda) {
  return GaussianKde(particles.positions(), lambda).log_density(theta);
}

}  // namespace dsvgd
