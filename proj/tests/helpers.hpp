#pragma once

#include "dsvgd/common.hpp"

#include <functional>

namespace dsvgd::testing {

// Central finite difference of a scalar function, one coordinate at a time.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-5) {
  Vector g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// Componentwise |a - b| <= tol * max(1, |b|): relative where the reference
// is large, absolute near zero.
inline bool close_rel(const Vector& a, const Vector& b, double tol) {
  for (Index j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > tol * std::max(1.0, std::abs(b[j]))) return false;
  }
  return true;
}

inline Matrix linspace_rows(double lo, double hi, Index n) {
  Matrix out(n, 1);
  for (Index i = 0; i < n; ++i) {
    out(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace dsvgd::testing
