#pragma once

#include "dsvgd/common.hpp"

namespace dsvgd {

// AdaGrad with momentum. The first call seeds the historical accumulator
// with the squared gradient itself; afterwards it decays as an exponential
// moving average:
//   historical <- m * historical + (1 - m) * grad.^2
//   step = base_rate * grad ./ (fudge + sqrt(historical))
class AdaGradMomentum {
 public:
  AdaGradMomentum(double base_rate, double momentum = 0.9, double fudge = 1e-6);

  Matrix step(const Matrix& grad);

  void reset();
  long steps_taken() const { return steps_; }
  double base_rate() const { return base_rate_; }

 private:
  double base_rate_;
  double momentum_;
  double fudge_;
  Matrix historical_;
  long steps_ = 0;
};

}  // namespace dsvgd
