#include "dsvgd/optimizer.hpp"

#include <cmath>

namespace dsvgd {

AdaGradMomentum::AdaGradMomentum(double base_rate, double momentum, double fudge)
    : base_rate_(base_rate), momentum_(momentum), fudge_(fudge) {
  if (!(base_rate > 0.0) || !std::isfinite(base_rate)) {
    throw std::invalid_argument("AdaGradMomentum: base_rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw std::invalid_argument("AdaGradMomentum: momentum must lie in [0, 1)");
  }
  if (!(fudge > 0.0)) {
    throw std::invalid_argument("AdaGradMomentum: fudge must be positive");
  }
}

Matrix AdaGradMomentum::step(const Matrix& grad) {
  if (steps_ == 0) {
    historical_ = grad.array().square();
  } else {
    if (grad.rows() != historical_.rows() || grad.cols() != historical_.cols()) {
      throw std::invalid_argument("AdaGradMomentum: gradient shape changed between steps");
    }
    historical_ = momentum_ * historical_ + (1.0 - momentum_) * grad.array().square().matrix();
  }
  ++steps_;
  return (base_rate_ * grad.array() / (fudge_ + historical_.array().sqrt())).matrix();
}

void AdaGradMomentum::reset() {
  historical_.resize(0, 0);
  steps_ = 0;
}

}  // namespace dsvgd
