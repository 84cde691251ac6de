#pragma once

#include "dsvgd/common.hpp"
#include "dsvgd/svgd.hpp"

#include <optional>
#include <vector>

namespace dsvgd {

// One weighted Gaussian component with a full SPD covariance.
struct GaussianComponent {
  double weight = 1.0;
  Vector mean;
  Matrix cov;

  Matrix precision;      // cov^-1
  Matrix chol_lower;     // L with cov = L L^T, used for sampling
  double log_norm = 0.0; // log of weight * N(mean, cov) normalizer
};

GaussianComponent make_component(double weight, Vector mean, Matrix cov);

// Sum of weighted Gaussian pdfs: f(x) = sum_c w_c N(x | mu_c, Sigma_c).
class GaussianMixture {
 public:
  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<GaussianComponent> components);

  static GaussianMixture single(Vector mean, Matrix cov);
  static GaussianMixture iso(double mean, double var);  // 1-D helper

  double log_density(const Vector& x) const;
  Vector score(const Vector& x) const;
  Matrix score_rows(const Matrix& points) const;
  Vector sample(Rng& rng) const;

  Index dim() const { return components_.front().mean.size(); }
  const std::vector<GaussianComponent>& components() const { return components_; }

 private:
  std::vector<GaussianComponent> components_;
};

// Unnormalized product of mixture factors, optionally multiplied by a
// uniform box factor: p~(x) = [box] * prod_f f_i(x). The score of the
// product is the sum of the factors' scores; the box contributes zero score
// inside its support and a domain error outside.
class MixtureProductTarget {
 public:
  MixtureProductTarget(std::vector<GaussianMixture> factors, std::optional<SupportBox> box);

  double log_density(const Vector& x) const;  // -inf outside the box
  Vector score(const Vector& x) const;        // throws std::domain_error outside the box
  Matrix score_rows(const Matrix& points) const;

  const std::vector<GaussianMixture>& factors() const { return factors_; }
  const std::optional<SupportBox>& box() const { return box_; }

 private:
  std::vector<GaussianMixture> factors_;
  std::optional<SupportBox> box_;
};

double mixture_log_density(const GaussianMixture& m, const Vector& x);
Vector mixture_score(const MixtureProductTarget& target, const Vector& x);

}  // namespace dsvgd
