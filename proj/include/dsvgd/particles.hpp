#pragma once

#include "dsvgd/common.hpp"

namespace dsvgd {

// A set of N particles in R^d, one per row. Construction rejects empty or
// non-finite data; the engine keeps the invariant while transporting.
class ParticleSet {
 public:
  explicit ParticleSet(Matrix positions) : positions_(std::move(positions)) {
    if (positions_.rows() < 1 || positions_.cols() < 1) {
      throw std::invalid_argument("ParticleSet: need at least one particle of dimension >= 1");
    }
    if (!positions_.allFinite()) {
      throw std::invalid_argument("ParticleSet: positions contain non-finite entries");
    }
  }

  Index count() const { return positions_.rows(); }
  Index dim() const { return positions_.cols(); }

  const Matrix& positions() const { return positions_; }
  Matrix& positions() { return positions_; }

  Vector particle(Index n) const { return positions_.row(n).transpose(); }

 private:
  Matrix positions_;
};

// RBF bandwidth h in k(x, y) = exp(-||x - y||^2 / h). Strictly positive.
class Bandwidth {
 public:
  explicit Bandwidth(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("Bandwidth: value must be positive and finite");
    }
  }

  double value() const { return value_; }

 private:
  double value_;
};

}  // namespace dsvgd
