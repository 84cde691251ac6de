#pragma once

#include "dsvgd/common.hpp"
#include "dsvgd/models/mlp.hpp"
#include "dsvgd/particles.hpp"

#include <functional>
#include <vector>

namespace dsvgd {

// Uniform tensor grid over one or two dimensions.
struct GridSpec {
  struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int points = 2;
  };
  std::vector<Axis> axes;
};

// KL(q || p) where q is the Gaussian KDE of the particles and p the target,
// both normalized on the grid by trapezoidal quadrature. The target log
// density may be -inf outside a uniform support; a cell with q > 0 and
// p = 0 yields +inf, and a target that is zero on the whole grid is an
// error. Cells with q = 0 contribute nothing.
double grid_kl(const ParticleSet& particles, double lambda,
               const std::function<double(const Vector&)>& log_target, const GridSpec& grid);

// Probit-approximate Bernoulli predictive for logistic-regression particles
// under the KDE posterior: p(y = +1 | x) = (1/N) sum_n sigmoid(kappa mu_n)
// with mu_n = w_n . x and kappa = (1 + pi sigma^2 / 8)^-1/2,
// sigma^2 = (x . x) / lambda^2. Particles carry [w, log xi]; only the w
// block is read.
double blr_predictive_probit(const ParticleSet& particles, double lambda, const Vector& x,
                             Index feature_dim);

// Plain particle average of the network outputs: softmax probabilities for
// classification, raw outputs for regression.
Vector bnn_predictive_mean(const ParticleSet& particles, const MlpModel& model, const Vector& x);

struct PointMetrics {
  double accuracy = 0.0;
  double avg_log_lik = 0.0;
  double rmse = 0.0;
};

// probs: one row per example with per-class probabilities (binary: column 0
// is p(y = -1), column 1 is p(y = +1)). labels: class indices, or -1/+1 for
// binary. Log likelihoods floor probabilities at 1e-12.
double classification_accuracy(const Matrix& probs, const Vector& labels, TaskKind task);
double avg_log_likelihood(const Matrix& probs, const Vector& labels, TaskKind task);

// RMSE in the original units: predictions/targets are destandardized with
// y_std/y_mean before the residual.
double rmse_destandardized(const Vector& pred, const Vector& target, double y_mean, double y_std);

struct ReliabilityBin {
  double lo = 0.0;  // bin covers (lo, hi]
  double hi = 0.0;
  long count = 0;
  double avg_confidence = 0.0;
  double accuracy = 0.0;
};

struct ReliabilityResult {
  std::vector<ReliabilityBin> bins;
  double mce = 0.0;  // max over nonempty bins of |accuracy - confidence|
};

// Equal-width confidence bins ((j-1)/B, j/B]; a confidence of exactly zero
// lands in the first bin so every scored sample is counted.
ReliabilityResult reliability_and_mce(const std::vector<double>& confidences,
                                      const std::vector<bool>& correct, int num_bins = 10);

}  // namespace dsvgd
