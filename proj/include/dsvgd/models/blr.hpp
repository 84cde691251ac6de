#pragma once

#include "dsvgd/dataset.hpp"
#include "dsvgd/models/local_model.hpp"

namespace dsvgd {

// Bayesian logistic regression with an unknown prior precision:
//   theta = [w, s],  s = log xi
//   p_0(w | xi) = N(0, xi^-1 I),  p_0(xi) = Gamma(a, b)  (rate b)
// handled in s coordinates with the +s change-of-variables term. Labels are
// -1/+1 and the loss is the logistic cross entropy sum_i log(1 + e^{-y w.x}).
struct BlrModel {
  Index feature_dim = 0;
  double gamma_shape = 1.0;
  double gamma_rate = 0.01;

  Index dim() const { return feature_dim + 1; }
};

struct Minibatch {
  Matrix x;
  Vector y;
  double scale = 1.0;  // |D_k| / |batch|
};

double blr_log_prior(const BlrModel& model, const Vector& theta);
Vector blr_prior_score(const BlrModel& model, const Vector& theta);
Matrix blr_sample_prior(const BlrModel& model, Index n, Rng& rng);

double blr_loss(const BlrModel& model, const Vector& theta, const Minibatch& batch);
Vector blr_loss_grad(const BlrModel& model, const Vector& theta, const Minibatch& batch);

// Score of the generalized local posterior on one batch:
//   grad_theta [ log p_0(theta) - (scale / alpha) * sum_batch l ].
Vector blr_score(const BlrModel& model, const Vector& theta, const Minibatch& batch,
                 double alpha = 1.0);

// Draws `size` rows without replacement (full data when size <= 0 or >= M).
Minibatch sample_minibatch(const Dataset& data, Index size, Rng& rng);

class BlrLocalModel final : public LocalModel {
 public:
  BlrLocalModel(BlrModel spec, Dataset shard, Index batch_size);

  Index dim() const override { return spec_.dim(); }
  double prior_log_density(const Vector& theta) const override;
  Vector prior_score(const Vector& theta) const override;
  Matrix sample_prior(Index n, Rng& rng) const override;
  Matrix loss_grad_rows(const Matrix& points, Rng& rng) override;
  double loss_value(const Vector& theta) const override;
  Vector loss_grad_exact(const Vector& theta) const override;

  const BlrModel& spec() const { return spec_; }
  const Dataset& data() const { return data_; }

 private:
  BlrModel spec_;
  Dataset data_;
  Index batch_size_;
};

}  // namespace dsvgd
