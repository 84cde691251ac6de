#pragma once

#include "dsvgd/common.hpp"

#include <functional>
#include <optional>

namespace dsvgd {

// A (possibly stochastic) score field s(theta) = grad log p~(theta). Fields
// backed by minibatches own their batch stream, so evaluation can advance
// internal state; results are deterministic for a fixed seed.
class ScoreField {
 public:
  virtual ~ScoreField() = default;

  // Rows of `points` are evaluation locations; returns one score per row.
  virtual Matrix score_rows(const Matrix& points) = 0;

  // Unnormalized log density, where a closed form exists.
  virtual std::optional<double> log_density(const Vector& point) const {
    (void)point;
    return std::nullopt;
  }
};

class FunctionScoreField final : public ScoreField {
 public:
  using ScoreFn = std::function<Matrix(const Matrix&)>;
  using LogDensityFn = std::function<double(const Vector&)>;

  explicit FunctionScoreField(ScoreFn score, LogDensityFn log_density = nullptr)
      : score_(std::move(score)), log_density_(std::move(log_density)) {}

  Matrix score_rows(const Matrix& points) override { return score_(points); }

  std::optional<double> log_density(const Vector& point) const override {
    if (!log_density_) return std::nullopt;
    return log_density_(point);
  }

 private:
  ScoreFn score_;
  LogDensityFn log_density_;
};

}  // namespace dsvgd
