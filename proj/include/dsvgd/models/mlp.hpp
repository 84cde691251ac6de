#pragma once

#include "dsvgd/dataset.hpp"
#include "dsvgd/models/blr.hpp"
#include "dsvgd/models/local_model.hpp"

namespace dsvgd {

// One-hidden-layer ReLU network with an isotropic Gaussian weight prior
// N(0, prior_precision^-1 I) over the flat parameter vector
//   theta = [W1 row-major (H x d), b1, W2 row-major (C x H), b2].
// Regression uses a unit-noise Gaussian likelihood (loss 0.5 (f - y)^2),
// classification the softmax cross entropy over C classes.
struct MlpModel {
  enum class Task { regression, classification };

  Index input_dim = 0;
  Index hidden_dim = 0;
  Index output_dim = 1;
  Task task = Task::regression;
  double prior_precision = 2.718281828459045235;

  Index dim() const {
    return hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim;
  }
};

Vector mlp_forward(const MlpModel& model, const Vector& theta, const Vector& x);

double mlp_log_prior(const MlpModel& model, const Vector& theta);
Vector mlp_prior_score(const MlpModel& model, const Vector& theta);
Matrix mlp_sample_prior(const MlpModel& model, Index n, Rng& rng);

double mlp_loss(const MlpModel& model, const Vector& theta, const Minibatch& batch);
Vector mlp_loss_grad(const MlpModel& model, const Vector& theta, const Minibatch& batch);

Vector mlp_score(const MlpModel& model, const Vector& theta, const Minibatch& batch,
                 double alpha = 1.0);

class MlpLocalModel final : public LocalModel {
 public:
  MlpLocalModel(MlpModel spec, Dataset shard, Index batch_size);

  Index dim() const override { return spec_.dim(); }
  double prior_log_density(const Vector& theta) const override;
  Vector prior_score(const Vector& theta) const override;
  Matrix sample_prior(Index n, Rng& rng) const override;
  Matrix loss_grad_rows(const Matrix& points, Rng& rng) override;
  double loss_value(const Vector& theta) const override;
  Vector loss_grad_exact(const Vector& theta) const override;

  const MlpModel& spec() const { return spec_; }
  const Dataset& data() const { return data_; }

 private:
  MlpModel spec_;
  Dataset data_;
  Index batch_size_;
};

}  // namespace dsvgd
