#pragma once

#include "dsvgd/common.hpp"
#include "dsvgd/optimizer.hpp"
#include "dsvgd/particles.hpp"
#include "dsvgd/score_field.hpp"

#include <optional>

namespace dsvgd {

// Axis-aligned box used to clamp particles onto the support of a uniform
// prior after each transport step.
struct SupportBox {
  Vector lo;
  Vector hi;

  void clamp_rows(Matrix& points) const {
    for (Index j = 0; j < points.cols(); ++j) {
      points.col(j) = points.col(j).cwiseMax(lo[j]).cwiseMin(hi[j]);
    }
  }

  bool contains(const Vector& point) const {
    return (point.array() >= lo.array()).all() && (point.array() <= hi.array()).all();
  }

  double log_volume() const { return (hi - lo).array().log().sum(); }
};

struct TransportOptions {
  enum class StepMode { plain, adagrad };
  enum class BandwidthRule { median_per_step, fixed };

  StepMode mode = StepMode::adagrad;
  double step_size = 0.05;  // plain mode epsilon
  double base_rate = 0.05;  // adagrad base rate
  double momentum = 0.9;
  double fudge = 1e-6;
  BandwidthRule bandwidth_rule = BandwidthRule::median_per_step;
  double fixed_bandwidth = 1.0;
};

struct TransportConfig {
  TransportOptions options;
  int num_steps = 1;
  std::optional<SupportBox> support;
};

// Per-particle update direction
//   delta_n = (1/N) sum_j [ k(theta_j, theta_n) s(theta_j) + grad_{theta_j} k(theta_j, theta_n) ]
// evaluated from precomputed scores (one row per particle).
Matrix svgd_direction(const Matrix& positions, const Matrix& scores, const Bandwidth& h);

// Evaluates the field at the current particles, then assembles the direction.
Matrix svgd_direction(const ParticleSet& particles, ScoreField& field, const Bandwidth& h);

// Runs num_steps transport steps, mutating `opt` across steps in adagrad
// mode. Throws std::runtime_error naming the offending step and particle on
// non-finite values.
ParticleSet svgd_run(const ParticleSet& init, ScoreField& field, const TransportConfig& cfg,
                     AdaGradMomentum& opt);

// Convenience overload with a fresh optimizer per call.
ParticleSet svgd_run(const ParticleSet& init, ScoreField& field, const TransportConfig& cfg);

}  // namespace dsvgd
