#pragma once

#include "dsvgd/common.hpp"
#include "dsvgd/particles.hpp"

namespace dsvgd {

struct KernelEval {
  double value;
  Vector grad_x;  // gradient with respect to the first argument
};

// k(x, y) = exp(-||x - y||^2 / h), grad_x k = -(2/h) (x - y) k.
KernelEval rbf_kernel_and_grad(const Vector& x, const Vector& y, const Bandwidth& h);

// Pairwise kernel matrix K_ij = k(p_i, p_j) for one particle set.
Matrix rbf_kernel_matrix(const Matrix& positions, const Bandwidth& h);

// Median heuristic h = med^2 / ln N over the N(N-1)/2 pairwise distances,
// falling back to 1.0 when N <= 1 or the rule degenerates (zero median,
// non-finite or non-positive result).
Bandwidth median_bandwidth(const ParticleSet& particles);

// Squared Euclidean distances between rows of a and rows of b.
Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);

}  // namespace dsvgd
