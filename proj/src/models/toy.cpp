#include "dsvgd/models/toy.hpp"

#include <cmath>
#include <limits>

namespace dsvgd {

ToyAgentModel::ToyAgentModel(ToyPrior prior, GaussianMixture factor)
    : prior_(std::move(prior)), factor_(std::move(factor)) {
  const Index d = dim();
  if (factor_.dim() != d) {
    throw std::invalid_argument("ToyAgentModel: factor dimension does not match prior");
  }
}

Index ToyAgentModel::dim() const {
  if (std::holds_alternative<GaussianMixture>(prior_)) {
    return std::get<GaussianMixture>(prior_).dim();
  }
  return std::get<UniformBoxPrior>(prior_).box.lo.size();
}

double ToyAgentModel::prior_log_density(const Vector& theta) const {
  if (std::holds_alternative<GaussianMixture>(prior_)) {
    return std::get<GaussianMixture>(prior_).log_density(theta);
  }
  const auto& box = std::get<UniformBoxPrior>(prior_).box;
  if (!box.contains(theta)) return -std::numeric_limits<double>::infinity();
  return -box.log_volume();
}

Vector ToyAgentModel::prior_score(const Vector& theta) const {
  if (std::holds_alternative<GaussianMixture>(prior_)) {
    return std::get<GaussianMixture>(prior_).score(theta);
  }
  return Vector::Zero(theta.size());
}

Matrix ToyAgentModel::sample_prior(Index n, Rng& rng) const {
  Matrix out(n, dim());
  if (std::holds_alternative<GaussianMixture>(prior_)) {
    const auto& m = std::get<GaussianMixture>(prior_);
    for (Index i = 0; i < n; ++i) out.row(i) = m.sample(rng).transpose();
  } else {
    const auto& box = std::get<UniformBoxPrior>(prior_).box;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < out.cols(); ++j) out(i, j) = rng.uniform(box.lo[j], box.hi[j]);
    }
  }
  return out;
}

Matrix ToyAgentModel::loss_grad_rows(const Matrix& points, Rng& rng) {
  (void)rng;
  return -factor_.score_rows(points);
}

double ToyAgentModel::loss_value(const Vector& theta) const {
  return -factor_.log_density(theta);
}

Vector ToyAgentModel::loss_grad_exact(const Vector& theta) const {
  return -factor_.score(theta);
}

std::optional<SupportBox> ToyAgentModel::support() const {
  if (std::holds_alternative<UniformBoxPrior>(prior_)) {
    return std::get<UniformBoxPrior>(prior_).box;
  }
  return std::nullopt;
}

namespace {

ToyPrior toy1d_prior(bool gaussian_prior) {
  if (gaussian_prior) return GaussianMixture::iso(0.0, 1.0);
  SupportBox box;
  box.lo = Vector::Constant(1, -6.0);
  box.hi = Vector::Constant(1, 6.0);
  return UniformBoxPrior{box};
}

}  // namespace

ToyProblem make_toy1d(bool gaussian_prior) {
  const GaussianMixture f1 = GaussianMixture::iso(1.0, 4.0);
  std::vector<GaussianComponent> cs;
  cs.push_back(make_component(1.0, Vector::Constant(1, -3.0), Matrix::Constant(1, 1, 1.0)));
  cs.push_back(make_component(1.0, Vector::Constant(1, 3.0), Matrix::Constant(1, 1, 2.0)));
  const GaussianMixture f2{cs};

  std::vector<LocalModelPtr> agents;
  agents.push_back(std::make_shared<ToyAgentModel>(toy1d_prior(gaussian_prior), f1));
  agents.push_back(std::make_shared<ToyAgentModel>(toy1d_prior(gaussian_prior), f2));

  std::vector<GaussianMixture> factors{f1, f2};
  std::optional<SupportBox> box;
  if (!gaussian_prior) {
    box = std::get<UniformBoxPrior>(toy1d_prior(false)).box;
  } else {
    factors.insert(factors.begin(), GaussianMixture::iso(0.0, 1.0));
  }
  return ToyProblem{std::move(agents), MixtureProductTarget(std::move(factors), box)};
}

ToyProblem make_toy2d() {
  Vector mu0(2), mu1(2), mu2(2), mu3(2);
  mu0 << 0.0, 0.0;
  mu1 << -1.71, -1.801;
  mu2 << 1.0, 0.0;
  mu3 << 1.0, 0.0;
  Matrix s0(2, 2), s1(2, 2), s2(2, 2), s3(2, 2);
  s0 << 4.0, 2.0, 2.0, 4.0;
  s1 << 0.226, 0.1652, 0.1652, 0.6779;
  s2 << 2.0, 0.5, 0.5, 2.0;
  s3 << 3.0, 0.5, 0.5, 3.0;

  const GaussianMixture prior = GaussianMixture::single(mu0, s0);
  std::vector<GaussianComponent> cs;
  cs.push_back(make_component(1.0, mu1, s1));
  cs.push_back(make_component(1.0, mu2, s2));
  const GaussianMixture f1{cs};
  const GaussianMixture f2 = GaussianMixture::single(mu3, s3);

  std::vector<LocalModelPtr> agents;
  agents.push_back(std::make_shared<ToyAgentModel>(prior, f1));
  agents.push_back(std::make_shared<ToyAgentModel>(prior, f2));
  return ToyProblem{std::move(agents), MixtureProductTarget({prior, f1, f2}, std::nullopt)};
}

}  // namespace dsvgd
