#pragma once

#include "dsvgd/models/local_model.hpp"
#include "dsvgd/models/mixture.hpp"

#include <variant>
#include <vector>

namespace dsvgd {

struct UniformBoxPrior {
  SupportBox box;
};

using ToyPrior = std::variant<GaussianMixture, UniformBoxPrior>;

// Agent model for the synthetic targets: the local posterior is
// prior * factor, i.e. the loss is L_k = -log factor (alpha = 1 units).
class ToyAgentModel final : public LocalModel {
 public:
  ToyAgentModel(ToyPrior prior, GaussianMixture factor);

  Index dim() const override;
  double prior_log_density(const Vector& theta) const override;
  Vector prior_score(const Vector& theta) const override;
  Matrix sample_prior(Index n, Rng& rng) const override;
  Matrix loss_grad_rows(const Matrix& points, Rng& rng) override;
  double loss_value(const Vector& theta) const override;
  Vector loss_grad_exact(const Vector& theta) const override;
  std::optional<SupportBox> support() const override;

  const GaussianMixture& factor() const { return factor_; }
  const ToyPrior& prior() const { return prior_; }

 private:
  ToyPrior prior_;
  GaussianMixture factor_;
};

struct ToyProblem {
  std::vector<LocalModelPtr> agents;
  MixtureProductTarget posterior;  // prior * all factors, for oracles
};

// 1-D two-agent problem: factors N(1, 4) and N(-3, 1) + N(3, 2) under
// either the uniform prior on [-6, 6] or a standard normal prior.
ToyProblem make_toy1d(bool gaussian_prior);

// 2-D two-agent problem: shared prior N(mu0, Sigma0); agent 1 carries the
// two-component mixture, agent 2 a single broad Gaussian.
ToyProblem make_toy2d();

}  // namespace dsvgd
