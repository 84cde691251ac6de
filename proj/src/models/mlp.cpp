#include "dsvgd/models/mlp.hpp"

#include <cmath>

namespace dsvgd {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct View {
  Eigen::Map<const RowMat> w1;
  Eigen::Map<const Vector> b1;
  Eigen::Map<const RowMat> w2;
  Eigen::Map<const Vector> b2;
};

View view(const MlpModel& m, const Vector& theta) {
  if (theta.size() != m.dim()) {
    throw std::invalid_argument("mlp: theta has size " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(m.dim()));
  }
  const double* p = theta.data();
  const Index w1n = m.hidden_dim * m.input_dim;
  const Index w2n = m.output_dim * m.hidden_dim;
  return View{
      Eigen::Map<const RowMat>(p, m.hidden_dim, m.input_dim),
      Eigen::Map<const Vector>(p + w1n, m.hidden_dim),
      Eigen::Map<const RowMat>(p + w1n + m.hidden_dim, m.output_dim, m.hidden_dim),
      Eigen::Map<const Vector>(p + w1n + m.hidden_dim + w2n, m.output_dim),
  };
}

struct MutView {
  Eigen::Map<RowMat> w1;
  Eigen::Map<Vector> b1;
  Eigen::Map<RowMat> w2;
  Eigen::Map<Vector> b2;
};

MutView mut_view(const MlpModel& m, Vector& theta) {
  double* p = theta.data();
  const Index w1n = m.hidden_dim * m.input_dim;
  const Index w2n = m.output_dim * m.hidden_dim;
  return MutView{
      Eigen::Map<RowMat>(p, m.hidden_dim, m.input_dim),
      Eigen::Map<Vector>(p + w1n, m.hidden_dim),
      Eigen::Map<RowMat>(p + w1n + m.hidden_dim, m.output_dim, m.hidden_dim),
      Eigen::Map<Vector>(p + w1n + m.hidden_dim + w2n, m.output_dim),
  };
}

Vector softmax(const Vector& f) {
  const double mx = f.maxCoeff();
  Vector e = (f.array() - mx).exp();
  return e / e.sum();
}

}  // namespace

Vector mlp_forward(const MlpModel& model, const Vector& theta, const Vector& x) {
  const View v = view(model, theta);
  const Vector z1 = v.w1 * x + v.b1;
  const Vector h = z1.cwiseMax(0.0);
  return v.w2 * h + v.b2;
}

double mlp_log_prior(const MlpModel& model, const Vector& theta) {
  const double lp = model.prior_precision;
  const double d = static_cast<double>(model.dim());
  constexpr double kLogTwoPi = 1.8378770664093454836;
  return 0.5 * d * (std::log(lp) - kLogTwoPi) - 0.5 * lp * theta.squaredNorm();
}

Vector mlp_prior_score(const MlpModel& model, const Vector& theta) {
  return -model.prior_precision * theta;
}

Matrix mlp_sample_prior(const MlpModel& model, Index n, Rng& rng) {
  const double std_w = 1.0 / std::sqrt(model.prior_precision);
  Matrix out(n, model.dim());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = std_w * rng.normal();
  }
  return out;
}

double mlp_loss(const MlpModel& model, const Vector& theta, const Minibatch& batch) {
  double acc = 0.0;
  for (Index i = 0; i < batch.x.rows(); ++i) {
    const Vector f = mlp_forward(model, theta, batch.x.row(i).transpose());
    if (model.task == MlpModel::Task::regression) {
      acc += 0.5 * (f[0] - batch.y[i]) * (f[0] - batch.y[i]);
    } else {
      const double mx = f.maxCoeff();
      const double lse = mx + std::log((f.array() - mx).exp().sum());
      acc += lse - f[static_cast<Index>(batch.y[i])];
    }
  }
  return acc;
}

Vector mlp_loss_grad(const MlpModel& model, const Vector& theta, const Minibatch& batch) {
  const View v = view(model, theta);
  Vector grad = Vector::Zero(model.dim());
  MutView g = mut_view(model, grad);

  for (Index i = 0; i < batch.x.rows(); ++i) {
    const Vector x = batch.x.row(i).transpose();
    const Vector z1 = v.w1 * x + v.b1;
    const Vector h = z1.cwiseMax(0.0);
    const Vector f = v.w2 * h + v.b2;

    Vector df;
    if (model.task == MlpModel::Task::regression) {
      df = Vector::Constant(1, f[0] - batch.y[i]);
    } else {
      df = softmax(f);
      df[static_cast<Index>(batch.y[i])] -= 1.0;
    }

    g.w2 += df * h.transpose();
    g.b2 += df;
    Vector dh = v.w2.transpose() * df;
    for (Index j = 0; j < dh.size(); ++j) {
      if (z1[j] <= 0.0) dh[j] = 0.0;
    }
    g.w1 += dh * x.transpose();
    g.b1 += dh;
  }
  return grad;
}

Vector mlp_score(const MlpModel& model, const Vector& theta, const Minibatch& batch, double alpha) {
  return mlp_prior_score(model, theta) -
         (batch.scale / alpha) * mlp_loss_grad(model, theta, batch);
}

MlpLocalModel::MlpLocalModel(MlpModel spec, Dataset shard, Index batch_size)
    : spec_(spec), data_(std::move(shard)), batch_size_(batch_size) {
  if (data_.rows() < 1) {
    throw std::invalid_argument("MlpLocalModel: empty data shard");
  }
  if (data_.features() != spec_.input_dim) {
    throw std::invalid_argument("MlpLocalModel: shard has " + std::to_string(data_.features()) +
                                " features, model expects " + std::to_string(spec_.input_dim));
  }
}

double MlpLocalModel::prior_log_density(const Vector& theta) const {
  return mlp_log_prior(spec_, theta);
}

Vector MlpLocalModel::prior_score(const Vector& theta) const {
  return mlp_prior_score(spec_, theta);
}

Matrix MlpLocalModel::sample_prior(Index n, Rng& rng) const {
  return mlp_sample_prior(spec_, n, rng);
}

Matrix MlpLocalModel::loss_grad_rows(const Matrix& points, Rng& rng) {
  const Minibatch batch = sample_minibatch(data_, batch_size_, rng);
  Matrix out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    out.row(i) = (batch.scale * mlp_loss_grad(spec_, points.row(i).transpose(), batch)).transpose();
  }
  return out;
}

double MlpLocalModel::loss_value(const Vector& theta) const {
  Minibatch full{data_.x, data_.y, 1.0};
  return mlp_loss(spec_, theta, full);
}

Vector MlpLocalModel::loss_grad_exact(const Vector& theta) const {
  Minibatch full{data_.x, data_.y, 1.0};
  return mlp_loss_grad(spec_, theta, full);
}

}  // namespace dsvgd
