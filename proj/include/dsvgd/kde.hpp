#pragma once

#include "dsvgd/common.hpp"
#include "dsvgd/particles.hpp"

namespace dsvgd {

// Isotropic Gaussian kernel density estimate q(theta) = (1/N) sum_n
// N(theta | theta_n, lambda^2 I). The score does not depend on the 1/N
// factor; log_density includes it together with the Gaussian normalizer so
// the reported values are proper log densities.
class GaussianKde {
 public:
  GaussianKde(Matrix centers, double lambda);

  double log_density(const Vector& theta) const;
  Vector score(const Vector& theta) const;

  // Rows of `points` are query locations; returns one score per row.
  Matrix score_rows(const Matrix& points) const;
  Vector log_density_rows(const Matrix& points) const;

  const Matrix& centers() const { return centers_; }
  double lambda() const { return lambda_; }

 private:
  Matrix centers_;
  double lambda_;
};

// Free-function forms of the same operations.
Vector kde_score(const Vector& theta, const ParticleSet& particles, double lambda);
double kde_log_density(const Vector& theta, const ParticleSet& particles, double lambda);

}  // namespace dsvgd
