#include "doctest.h"

#include "dsvgd/kde.hpp"
#include "dsvgd/kernel.hpp"

#include "helpers.hpp"

#include <cmath>

using namespace dsvgd;
using dsvgd::testing::close_rel;
using dsvgd::testing::fd_gradient;

TEST_CASE("rbf kernel closed forms") {
  Vector x(1), y(1);
  x << 3.0;
  y << 3.0;
  KernelEval same = rbf_kernel_and_grad(x, y, Bandwidth(1.0));
  CHECK(same.value == doctest::Approx(1.0));
  CHECK(same.grad_x[0] == doctest::Approx(0.0));

  x << 0.0;
  y << 1.0;
  KernelEval off = rbf_kernel_and_grad(x, y, Bandwidth(1.0));
  CHECK(off.value == doctest::Approx(std::exp(-1.0)));
  // grad_x = (-2 / h) k (x - y) with x - y = -1 here.
  CHECK(off.grad_x[0] == doctest::Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("rbf kernel symmetry and range") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(3), y(3);
    for (Index j = 0; j < 3; ++j) {
      x[j] = rng.normal();
      y[j] = rng.normal();
    }
    const Bandwidth h(0.5 + rng.uniform());
    KernelEval xy = rbf_kernel_and_grad(x, y, h);
    KernelEval yx = rbf_kernel_and_grad(y, x, h);
    CHECK(xy.value == doctest::Approx(yx.value));
    CHECK((xy.grad_x + yx.grad_x).norm() == doctest::Approx(0.0));
    CHECK(xy.value > 0.0);
    CHECK(xy.value <= 1.0);
  }
}

TEST_CASE("rbf kernel rejects bad input") {
  Vector x(1), y(1);
  x << 0.0;
  y << 1.0;
  CHECK_THROWS_AS(Bandwidth(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Bandwidth(-1.0), std::invalid_argument);
  Vector longer(2);
  longer << 0.0, 1.0;
  CHECK_THROWS_AS(rbf_kernel_and_grad(x, longer, Bandwidth(1.0)), std::invalid_argument);
  Matrix with_nan(2, 1);
  with_nan << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ParticleSet{with_nan}, std::invalid_argument);
}

TEST_CASE("median bandwidth examples") {
  Matrix two(2, 1);
  two << 0.0, 2.0;
  CHECK(median_bandwidth(ParticleSet(two)).value() == doctest::Approx(4.0 / std::log(2.0)));

  Matrix collapsed(3, 1);
  collapsed << 5.0, 5.0, 5.0;
  CHECK(median_bandwidth(ParticleSet(collapsed)).value() == doctest::Approx(1.0));

  Matrix three(3, 1);
  three << 0.0, 1.0, 3.0;
  CHECK(median_bandwidth(ParticleSet(three)).value() == doctest::Approx(4.0 / std::log(3.0)));

  Matrix one(1, 2);
  one << 0.4, -0.2;
  CHECK(median_bandwidth(ParticleSet(one)).value() == doctest::Approx(1.0));
}

TEST_CASE("median bandwidth is permutation invariant") {
  Rng rng(3);
  Matrix pts(7, 2);
  for (Index i = 0; i < pts.size(); ++i) pts(i / 2, i % 2) = rng.normal();
  Matrix reversed = pts.colwise().reverse();
  CHECK(median_bandwidth(ParticleSet(pts)).value() ==
        doctest::Approx(median_bandwidth(ParticleSet(reversed)).value()));
}

TEST_CASE("kde score closed forms") {
  Matrix center(1, 1);
  center << 0.0;
  Vector theta(1);
  theta << 0.55;
  Vector s = kde_score(theta, ParticleSet(center), 0.55);
  CHECK(s[0] == doctest::Approx(-0.55 / 0.3025));

  Matrix pair(2, 1);
  pair << -1.0, 1.0;
  theta << 0.0;
  CHECK(kde_score(theta, ParticleSet(pair), 0.7)[0] == doctest::Approx(0.0));
}

TEST_CASE("kde score matches finite differences") {
  Rng rng(17);
  Matrix centers(3, 2);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) centers(i, j) = rng.normal();
  const ParticleSet set(centers);
  for (int trial = 0; trial < 100; ++trial) {
    Vector theta(2);
    theta << 2.0 * rng.normal(), 2.0 * rng.normal();
    const Vector s = kde_score(theta, set, 0.8);
    const Vector fd = fd_gradient(
        [&](const Vector& t) { return kde_log_density(t, set, 0.8); }, theta);
    CHECK(close_rel(fd, s, 1e-5));
  }
}

TEST_CASE("kde score is translation equivariant") {
  Rng rng(5);
  Matrix centers(4, 1);
  for (Index i = 0; i < 4; ++i) centers(i, 0) = rng.normal();
  Vector theta(1);
  theta << 0.3;
  const Vector base = kde_score(theta, ParticleSet(centers), 0.55);
  const double c = 2.75;
  Vector shifted_theta = theta.array() + c;
  Matrix shifted_centers = centers.array() + c;
  const Vector shifted = kde_score(shifted_theta, ParticleSet(shifted_centers), 0.55);
  CHECK((base - shifted).norm() < 1e-12);
}

TEST_CASE("kde log density is a proper density in 1-D") {
  Matrix centers(2, 1);
  centers << -1.0, 2.0;
  GaussianKde kde(centers, 0.55);
  double mass = 0.0;
  const double step = 0.01;
  for (double x = -8.0; x <= 9.0; x += step) {
    Vector t(1);
    t << x;
    mass += std::exp(kde.log_density(t)) * step;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kde rejects a non-positive bandwidth") {
  Matrix centers(1, 1);
  centers << 0.0;
  CHECK_THROWS_AS(GaussianKde(centers, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianKde(centers, -0.5), std::invalid_argument);
}

TEST_CASE("pairwise squared distances") {
  Matrix a(2, 2), b(1, 2);
  a << 0.0, 0.0, 3.0, 4.0;
  b << 0.0, 0.0;
  Matrix d = pairwise_sq_dists(a, b);
  CHECK(d(0, 0) == doctest::Approx(0.0));
  CHECK(d(1, 0) == doctest::Approx(25.0));
}
