#include "dsvgd/models/mixture.hpp"

#include <cmath>
#include <limits>

namespace dsvgd {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

GaussianComponent make_component(double weight, Vector mean, Matrix cov) {
  if (!(weight > 0.0)) {
    throw std::invalid_argument("make_component: weight must be positive");
  }
  if (cov.rows() != cov.cols() || cov.rows() != mean.size()) {
    throw std::invalid_argument("make_component: covariance shape does not match mean");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("make_component: covariance is not positive definite");
  }
  GaussianComponent c;
  c.weight = weight;
  c.mean = std::move(mean);
  c.cov = cov;
  c.chol_lower = llt.matrixL();
  c.precision = llt.solve(Matrix::Identity(cov.rows(), cov.cols()));
  const double log_det = 2.0 * c.chol_lower.diagonal().array().log().sum();
  c.log_norm = std::log(weight) - 0.5 * (static_cast<double>(cov.rows()) * kLogTwoPi + log_det);
  return c;
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw std::invalid_argument("GaussianMixture: need at least one component");
  }
  for (const auto& c : components_) {
    if (c.mean.size() != components_.front().mean.size()) {
      throw std::invalid_argument("GaussianMixture: component dimensions differ");
    }
  }
}

GaussianMixture GaussianMixture::single(Vector mean, Matrix cov) {
  std::vector<GaussianComponent> cs;
  cs.push_back(make_component(1.0, std::move(mean), std::move(cov)));
  return GaussianMixture(std::move(cs));
}

GaussianMixture GaussianMixture::iso(double mean, double var) {
  Vector m(1);
  m[0] = mean;
  Matrix c(1, 1);
  c(0, 0) = var;
  return single(std::move(m), std::move(c));
}

double GaussianMixture::log_density(const Vector& x) const {
  double mx = kNegInf;
  std::vector<double> logs(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const Vector d = x - c.mean;
    logs[i] = c.log_norm - 0.5 * d.dot(c.precision * d);
    mx = std::max(mx, logs[i]);
  }
  double acc = 0.0;
  for (const double l : logs) acc += std::exp(l - mx);
  return mx + std::log(acc);
}

Vector GaussianMixture::score(const Vector& x) const {
  // Responsibility-weighted sum of the component scores, in log space.
  double mx = kNegInf;
  std::vector<double> logs(components_.size());
  std::vector<Vector> grads(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const Vector d = x - c.mean;
    logs[i] = c.log_norm - 0.5 * d.dot(c.precision * d);
    grads[i] = -(c.precision * d);
    mx = std::max(mx, logs[i]);
  }
  double total = 0.0;
  Vector out = Vector::Zero(x.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double w = std::exp(logs[i] - mx);
    total += w;
    out += w * grads[i];
  }
  return out / total;
}

Matrix GaussianMixture::score_rows(const Matrix& points) const {
  Matrix out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    out.row(i) = score(points.row(i).transpose()).transpose();
  }
  return out;
}

Vector GaussianMixture::sample(Rng& rng) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight;
  double u = rng.uniform() * total;
  std::size_t pick = components_.size() - 1;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    u -= components_[i].weight;
    if (u <= 0.0) {
      pick = i;
      break;
    }
  }
  const auto& c = components_[pick];
  Vector z(c.mean.size());
  for (Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
  return c.mean + c.chol_lower * z;
}

MixtureProductTarget::MixtureProductTarget(std::vector<GaussianMixture> factors,
                                           std::optional<SupportBox> box)
    : factors_(std::move(factors)), box_(std::move(box)) {
  if (factors_.empty() && !box_) {
    throw std::invalid_argument("MixtureProductTarget: need at least one factor");
  }
}

double MixtureProductTarget::log_density(const Vector& x) const {
  double acc = 0.0;
  if (box_) {
    if (!box_->contains(x)) return kNegInf;
    acc -= box_->log_volume();
  }
  for (const auto& f : factors_) acc += f.log_density(x);
  return acc;
}

Vector MixtureProductTarget::score(const Vector& x) const {
  if (box_ && !box_->contains(x)) {
    throw std::domain_error("MixtureProductTarget: point outside the uniform support");
  }
  Vector out = Vector::Zero(x.size());
  for (const auto& f : factors_) out += f.score(x);
  return out;
}

Matrix MixtureProductTarget::score_rows(const Matrix& points) const {
  Matrix out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    out.row(i) = score(points.row(i).transpose()).transpose();
  }
  return out;
}

double mixture_log_density(const GaussianMixture& m, const Vector& x) {
  return m.log_density(x);
}

Vector mixture_score(const MixtureProductTarget& target, const Vector& x) {
  return target.score(x);
}

}  // namespace dsvgd
