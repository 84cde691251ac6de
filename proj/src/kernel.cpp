#include "dsvgd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dsvgd {

KernelEval rbf_kernel_and_grad(const Vector& x, const Vector& y, const Bandwidth& h) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("rbf_kernel_and_grad: dimension mismatch between x and y");
  }
  const Vector diff = x - y;
  const double k = std::exp(-diff.squaredNorm() / h.value());
  KernelEval out;
  out.value = k;
  out.grad_x = (-2.0 / h.value()) * k * diff;
  return out;
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("pairwise_sq_dists: dimension mismatch");
  }
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix d = (-2.0 * a * b.transpose());
  d.colwise() += an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

Matrix rbf_kernel_matrix(const Matrix& positions, const Bandwidth& h) {
  return (-pairwise_sq_dists(positions, positions) / h.value()).array().exp().matrix();
}

Bandwidth median_bandwidth(const ParticleSet& particles) {
  const Index n = particles.count();
  if (n <= 1) return Bandwidth(1.0);

  const Matrix& p = particles.positions();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      dists.push_back((p.row(i) - p.row(j)).norm());
    }
  }

  const std::size_t m = dists.size();
  const std::size_t mid = m / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double med = dists[mid];
  if (m % 2 == 0) {
    std::nth_element(dists.begin(), dists.begin() + mid - 1, dists.begin() + mid);
    med = 0.5 * (med + dists[mid - 1]);
  }

  const double h = med * med / std::log(static_cast<double>(n));
  if (!(h > 0.0) || !std::isfinite(h)) return Bandwidth(1.0);
  return Bandwidth(h);
}

}  // namespace dsvgd
