#include "dsvgd/models/blr.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace dsvgd {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  if (m > 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_theta(const BlrModel& model, const Vector& theta) {
  if (theta.size() != model.dim()) {
    throw std::invalid_argument("blr: theta has size " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(model.dim()));
  }
}

void check_label(double y) {
  if (y != 1.0 && y != -1.0) {
    throw std::invalid_argument("blr: binary labels must be -1 or +1, got " + std::to_string(y));
  }
}

}  // namespace

double blr_log_prior(const BlrModel& model, const Vector& theta) {
  check_theta(model, theta);
  const Index d = model.feature_dim;
  const auto w = theta.head(d);
  const double s = theta[d];
  const double xi = std::exp(s);
  const double a = model.gamma_shape;
  const double b = model.gamma_rate;

  const double log_w = 0.5 * d * (s - kLogTwoPi) - 0.5 * xi * w.squaredNorm();
  const double log_xi = a * std::log(b) - std::lgamma(a) + (a - 1.0) * s - b * xi;
  return log_w + log_xi + s;  // trailing s is the log-space Jacobian
}

Vector blr_prior_score(const BlrModel& model, const Vector& theta) {
  check_theta(model, theta);
  const Index d = model.feature_dim;
  const auto w = theta.head(d);
  const double s = theta[d];
  const double xi = std::exp(s);

  Vector g(model.dim());
  g.head(d) = -xi * w;
  g[d] = 0.5 * d - 0.5 * xi * w.squaredNorm() + model.gamma_shape - model.gamma_rate * xi;
  return g;
}

Matrix blr_sample_prior(const BlrModel& model, Index n, Rng& rng) {
  Matrix out(n, model.dim());
  for (Index i = 0; i < n; ++i) {
    const double xi = rng.gamma(model.gamma_shape, model.gamma_rate);
    const double std_w = 1.0 / std::sqrt(xi);
    for (Index j = 0; j < model.feature_dim; ++j) out(i, j) = std_w * rng.normal();
    out(i, model.feature_dim) = std::log(xi);
  }
  return out;
}

double blr_loss(const BlrModel& model, const Vector& theta, const Minibatch& batch) {
  check_theta(model, theta);
  const auto w = theta.head(model.feature_dim);
  double acc = 0.0;
  for (Index i = 0; i < batch.x.rows(); ++i) {
    check_label(batch.y[i]);
    acc += softplus_neg(batch.y[i] * batch.x.row(i).dot(w));
  }
  return acc;
}

Vector blr_loss_grad(const BlrModel& model, const Vector& theta, const Minibatch& batch) {
  check_theta(model, theta);
  const auto w = theta.head(model.feature_dim);
  Vector g = Vector::Zero(model.dim());
  for (Index i = 0; i < batch.x.rows(); ++i) {
    check_label(batch.y[i]);
    const double m = batch.y[i] * batch.x.row(i).dot(w);
    g.head(model.feature_dim) -= sigmoid(-m) * batch.y[i] * batch.x.row(i).transpose();
  }
  return g;
}

Vector blr_score(const BlrModel& model, const Vector& theta, const Minibatch& batch, double alpha) {
  return blr_prior_score(model, theta) -
         (batch.scale / alpha) * blr_loss_grad(model, theta, batch);
}

Minibatch sample_minibatch(const Dataset& data, Index size, Rng& rng) {
  const Index m = data.rows();
  Minibatch batch;
  if (size <= 0 || size >= m) {
    batch.x = data.x;
    batch.y = data.y;
    batch.scale = 1.0;
    return batch;
  }
  std::vector<Index> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  batch.x.resize(size, data.features());
  batch.y.resize(size);
  for (Index i = 0; i < size; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - i)));
    std::swap(idx[i], idx[j]);
    batch.x.row(i) = data.x.row(idx[i]);
    batch.y[i] = data.y[idx[i]];
  }
  batch.scale = static_cast<double>(m) / static_cast<double>(size);
  return batch;
}

BlrLocalModel::BlrLocalModel(BlrModel spec, Dataset shard, Index batch_size)
    : spec_(spec), data_(std::move(shard)), batch_size_(batch_size) {
  if (data_.rows() < 1) {
    throw std::invalid_argument("BlrLocalModel: empty data shard");
  }
  if (data_.features() != spec_.feature_dim) {
    throw std::invalid_argument("BlrLocalModel: shard has " + std::to_string(data_.features()) +
                                " features, model expects " + std::to_string(spec_.feature_dim));
  }
}

double BlrLocalModel::prior_log_density(const Vector& theta) const {
  return blr_log_prior(spec_, theta);
}

Vector BlrLocalModel::prior_score(const Vector& theta) const {
  return blr_prior_score(spec_, theta);
}

Matrix BlrLocalModel::sample_prior(Index n, Rng& rng) const {
  return blr_sample_prior(spec_, n, rng);
}

Matrix BlrLocalModel::loss_grad_rows(const Matrix& points, Rng& rng) {
  const Minibatch batch = sample_minibatch(data_, batch_size_, rng);
  Matrix out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    out.row(i) = (batch.scale * blr_loss_grad(spec_, points.row(i).transpose(), batch)).transpose();
  }
  return out;
}

double BlrLocalModel::loss_value(const Vector& theta) const {
  Minibatch full{data_.x, data_.y, 1.0};
  return blr_loss(spec_, theta, full);
}

Vector BlrLocalModel::loss_grad_exact(const Vector& theta) const {
  Minibatch full{data_.x, data_.y, 1.0};
  return blr_loss_grad(spec_, theta, full);
}

}  // namespace dsvgd
