#include "dsvgd/metrics.hpp"

#include "dsvgd/kde.hpp"

#include <cmath>
#include <limits>

namespace dsvgd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(sum_i w_i exp(l_i)) over finite entries; -inf when all mass vanishes.
double weighted_lse(const std::vector<double>& logs, const std::vector<double>& weights) {
  double mx = kNegInf;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (std::isfinite(logs[i])) mx = std::max(mx, logs[i]);
  }
  if (!std::isfinite(mx)) return kNegInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (std::isfinite(logs[i])) acc += weights[i] * std::exp(logs[i] - mx);
  }
  return mx + std::log(acc);
}

}  // namespace

double grid_kl(const ParticleSet& particles, double lambda,
               const std::function<double(const Vector&)>& log_target, const GridSpec& grid) {
  const std::size_t d = grid.axes.size();
  if (d < 1 || d > 2) {
    throw std::invalid_argument("grid_kl: grid must cover one or two dimensions");
  }
  if (particles.dim() != static_cast<Index>(d)) {
    throw std::invalid_argument("grid_kl: particle dimension does not match the grid");
  }
  for (const auto& ax : grid.axes) {
    if (ax.points < 2 || !(ax.hi > ax.lo)) {
      throw std::invalid_argument("grid_kl: each axis needs hi > lo and at least two points");
    }
  }

  // Flattened grid nodes with trapezoidal weights (0.5 at the edges).
  std::vector<Vector> nodes;
  std::vector<double> weights;
  if (d == 1) {
    const auto& ax = grid.axes[0];
    const double step = (ax.hi - ax.lo) / (ax.points - 1);
    for (int i = 0; i < ax.points; ++i) {
      Vector v(1);
      v[0] = ax.lo + step * i;
      nodes.push_back(v);
      weights.push_back(step * ((i == 0 || i == ax.points - 1) ? 0.5 : 1.0));
    }
  } else {
    const auto& ax0 = grid.axes[0];
    const auto& ax1 = grid.axes[1];
    const double s0 = (ax0.hi - ax0.lo) / (ax0.points - 1);
    const double s1 = (ax1.hi - ax1.lo) / (ax1.points - 1);
    for (int i = 0; i < ax0.points; ++i) {
      const double w0 = s0 * ((i == 0 || i == ax0.points - 1) ? 0.5 : 1.0);
      for (int j = 0; j < ax1.points; ++j) {
        const double w1 = s1 * ((j == 0 || j == ax1.points - 1) ? 0.5 : 1.0);
        Vector v(2);
        v << ax0.lo + s0 * i, ax1.lo + s1 * j;
        nodes.push_back(v);
        weights.push_back(w0 * w1);
      }
    }
  }

  const std::size_t g = nodes.size();
  Matrix qpts(static_cast<Index>(g), static_cast<Index>(d));
  for (std::size_t i = 0; i < g; ++i) qpts.row(static_cast<Index>(i)) = nodes[i].transpose();
  const GaussianKde kde(particles.positions(), lambda);
  const Vector log_q_raw = kde.log_density_rows(qpts);

  std::vector<double> log_q(g), log_p(g);
  for (std::size_t i = 0; i < g; ++i) {
    log_q[i] = log_q_raw[static_cast<Index>(i)];
    const double lp = log_target(nodes[i]);
    if (std::isnan(lp) || lp == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("grid_kl: target log density is NaN or +inf on the grid");
    }
    log_p[i] = lp;
  }

  const double log_zq = weighted_lse(log_q, weights);
  const double log_zp = weighted_lse(log_p, weights);
  if (!std::isfinite(log_zp)) {
    throw std::invalid_argument("grid_kl: target has zero mass on the grid");
  }
  if (!std::isfinite(log_zq)) {
    throw std::invalid_argument("grid_kl: particle KDE has zero mass on the grid");
  }

  double kl = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double lq = log_q[i] - log_zq;
    const double q = std::exp(lq);
    if (q == 0.0) continue;
    const double lp = log_p[i] - log_zp;
    if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();
    kl += weights[i] * q * (lq - lp);
  }
  return kl;
}

double blr_predictive_probit(const ParticleSet& particles, double lambda, const Vector& x,
                             Index feature_dim) {
  if (particles.dim() != feature_dim + 1) {
    throw std::invalid_argument("blr_predictive_probit: particles must carry [w, log xi]");
  }
  if (x.size() != feature_dim) {
    throw std::invalid_argument("blr_predictive_probit: input dimension mismatch");
  }
  const double sigma_sq = x.squaredNorm() / (lambda * lambda);
  const double kappa = 1.0 / std::sqrt(1.0 + kPi * sigma_sq / 8.0);
  double acc = 0.0;
  for (Index n = 0; n < particles.count(); ++n) {
    const double mu = particles.positions().row(n).head(feature_dim).dot(x);
    acc += sigmoid(kappa * mu);
  }
  return acc / static_cast<double>(particles.count());
}

Vector bnn_predictive_mean(const ParticleSet& particles, const MlpModel& model, const Vector& x) {
  Vector acc = Vector::Zero(model.output_dim);
  for (Index n = 0; n < particles.count(); ++n) {
    Vector f = mlp_forward(model, particles.particle(n), x);
    if (model.task == MlpModel::Task::classification) {
      const double mx = f.maxCoeff();
      Vector e = (f.array() - mx).exp();
      f = e / e.sum();
    }
    acc += f;
  }
  return acc / static_cast<double>(particles.count());
}

double classification_accuracy(const Matrix& probs, const Vector& labels, TaskKind task) {
  if (probs.rows() != labels.size() || probs.rows() == 0) {
    throw std::invalid_argument("classification_accuracy: shape mismatch or empty input");
  }
  long hits = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    Index arg = 0;
    probs.row(i).maxCoeff(&arg);
    const Index truth =
        task == TaskKind::binary ? (labels[i] > 0.0 ? 1 : 0) : static_cast<Index>(labels[i]);
    if (arg == truth) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(probs.rows());
}

double avg_log_likelihood(const Matrix& probs, const Vector& labels, TaskKind task) {
  if (probs.rows() != labels.size() || probs.rows() == 0) {
    throw std::invalid_argument("avg_log_likelihood: shape mismatch or empty input");
  }
  double acc = 0.0;
  for (Index i = 0; i < probs.rows(); ++i) {
    const Index truth =
        task == TaskKind::binary ? (labels[i] > 0.0 ? 1 : 0) : static_cast<Index>(labels[i]);
    acc += std::log(std::max(probs(i, truth), 1e-12));
  }
  return acc / static_cast<double>(probs.rows());
}

double rmse_destandardized(const Vector& pred, const Vector& target, double y_mean, double y_std) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw std::invalid_argument("rmse_destandardized: shape mismatch or empty input");
  }
  const Vector p = (pred.array() * y_std + y_mean).matrix();
  const Vector t = (target.array() * y_std + y_mean).matrix();
  return std::sqrt((p - t).squaredNorm() / static_cast<double>(pred.size()));
}

ReliabilityResult reliability_and_mce(const std::vector<double>& confidences,
                                      const std::vector<bool>& correct, int num_bins) {
  if (confidences.size() != correct.size() || confidences.empty()) {
    throw std::invalid_argument("reliability_and_mce: shape mismatch or empty input");
  }
  if (num_bins < 1) {
    throw std::invalid_argument("reliability_and_mce: num_bins must be >= 1");
  }

  ReliabilityResult out;
  out.bins.resize(num_bins);
  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<long> hit_sum(num_bins, 0);
  for (int j = 0; j < num_bins; ++j) {
    out.bins[j].lo = static_cast<double>(j) / num_bins;
    out.bins[j].hi = static_cast<double>(j + 1) / num_bins;
  }

  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0) || c > 1.0) {
      throw std::invalid_argument("reliability_and_mce: confidence outside [0, 1] at index " +
                                  std::to_string(i));
    }
    int j = static_cast<int>(std::ceil(c * num_bins)) - 1;
    j = std::max(0, std::min(num_bins - 1, j));
    ++out.bins[j].count;
    conf_sum[j] += c;
    if (correct[i]) ++hit_sum[j];
  }

  double mce = 0.0;
  for (int j = 0; j < num_bins; ++j) {
    if (out.bins[j].count == 0) continue;
    out.bins[j].avg_confidence = conf_sum[j] / static_cast<double>(out.bins[j].count);
    out.bins[j].accuracy = static_cast<double>(hit_sum[j]) / static_cast<double>(out.bins[j].count);
    mce = std::max(mce, std::abs(out.bins[j].accuracy - out.bins[j].avg_confidence));
  }
  out.mce = mce;
  return out;
}

}  // namespace dsvgd
