#include "dsvgd/svgd.hpp"

#include "dsvgd/kernel.hpp"

#include <cmath>
#include <string>

namespace dsvgd {

namespace {

void require_finite_rows(const Matrix& m, const char* what) {
  if (m.allFinite()) return;
  for (Index i = 0; i < m.rows(); ++i) {
    if (!m.row(i).allFinite()) {
      throw std::runtime_error(std::string(what) + " is non-finite at particle " + std::to_string(i));
    }
  }
}

Bandwidth pick_bandwidth(const ParticleSet& particles, const TransportOptions& opts) {
  if (opts.bandwidth_rule == TransportOptions::BandwidthRule::fixed) {
    return Bandwidth(opts.fixed_bandwidth);
  }
  return median_bandwidth(particles);
}

}  // namespace

Matrix svgd_direction(const Matrix& positions, const Matrix& scores, const Bandwidth& h) {
  if (positions.rows() != scores.rows() || positions.cols() != scores.cols()) {
    throw std::invalid_argument("svgd_direction: scores shape must match positions");
  }
  require_finite_rows(scores, "svgd_direction: score");

  const Index n = positions.rows();
  const Matrix k = rbf_kernel_matrix(positions, h);
  // Attraction: row n collects sum_j k_jn s_j; K is symmetric.
  const Matrix attract = k * scores;
  // Repulsion: sum_j grad_{theta_j} k(theta_j, theta_n)
  //          = -(2/h) [ sum_j k_jn theta_j - (sum_j k_jn) theta_n ].
  const Vector colsum = k.colwise().sum().transpose();
  const Matrix repulse = (-2.0 / h.value()) * (k * positions - colsum.asDiagonal() * positions);
  return (attract + repulse) / static_cast<double>(n);
}

Matrix svgd_direction(const ParticleSet& particles, ScoreField& field, const Bandwidth& h) {
  return svgd_direction(particles.positions(), field.score_rows(particles.positions()), h);
}

ParticleSet svgd_run(const ParticleSet& init, ScoreField& field, const TransportConfig& cfg,
                     AdaGradMomentum& opt) {
  if (cfg.num_steps < 1) {
    throw std::invalid_argument("svgd_run: num_steps must be >= 1");
  }
  ParticleSet particles = init;
  for (int step = 0; step < cfg.num_steps; ++step) {
    try {
      const Bandwidth h = pick_bandwidth(particles, cfg.options);
      const Matrix direction = svgd_direction(particles, field, h);
      Matrix delta;
      if (cfg.options.mode == TransportOptions::StepMode::plain) {
        delta = cfg.options.step_size * direction;
      } else {
        delta = opt.step(direction);
      }
      particles.positions() += delta;
      if (cfg.support) cfg.support->clamp_rows(particles.positions());
      require_finite_rows(particles.positions(), "svgd_run: particle");
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("svgd_run: step " + std::to_string(step + 1) + ": " + e.what());
    }
  }
  return particles;
}

ParticleSet svgd_run(const ParticleSet& init, ScoreField& field, const TransportConfig& cfg) {
  AdaGradMomentum opt(cfg.options.base_rate, cfg.options.momentum, cfg.options.fudge);
  return svgd_run(init, field, cfg, opt);
}

}  // namespace dsvgd
