// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kianc/error.hpp"
#include "kianc/kernel_interp.hpp"
#include "oracles.hpp"

using namespace kianc;

namespace {

constexpr double kPi = std::numbers::pi;

const Scene& paper() {
  static const Scene scene = build_scene_paper();
  return scene;
}

FrequencyContext at(double f) { return make_frequency_context(f, 340.0, 1.3); }

// Integral of f over the disk of radius r about the origin: Gauss-Legendre in
// radius, trapezoid in angle.
double polar_integral(const std::function<double(double, double)>& f, double r, int radial, int angular) {
  std::vector<double> x, w;
  gauss_legendre(radial, x, w);
  double total = 0.0;
  for (int i = 0; i < radial; ++i) {
    const double rho = 0.5 * r * (x[i] + 1.0);
    double ring = 0.0;
    for (int a = 0; a < angular; ++a) {
      const double phi = 2 * kPi * a / angular;
      ring += f(rho * std::cos(phi), rho * std::sin(phi));
    }
    total += 0.5 * r * w[i] * rho * ring * (2 * kPi / angular);
  }
  return total;
}

}  // namespace

TEST_CASE("kernel values") {
  CHECK(kernel({0.1, 0.2, 0}, {0.1, 0.2, 0}, 11.0, 2) == 1.0);
  CHECK(kernel({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, 11.0, 3) == 1.0);
  const double k = 2.404825557695773 / 0.3;
  CHECK(std::fabs(kernel({0.3, 0, 0}, {0, 0, 0}, k, 2)) <= 1e-9);
  CHECK(std::fabs(kernel({0, 0.3, 0}, {0, 0, 0}, kPi / 0.3, 3)) <= 1e-15);
}

TEST_CASE("kernel depends only on distance") {
  oracle::Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const Position a{rng.uniform(-1, 1), rng.uniform(-1, 1), 0}, b{rng.uniform(-1, 1), rng.uniform(-1, 1), 0};
    const double t = rng.uniform(0, 2 * kPi), c = std::cos(t), s = std::sin(t);
    const Position ar{c * a.x - s * a.y, s * a.x + c * a.y, 0}, br{c * b.x - s * b.y, s * b.x + c * b.y, 0};
    CHECK(kernel(a, b, 9.0, 2) == doctest::Approx(kernel(ar, br, 9.0, 2)).epsilon(1e-12));
    CHECK(kernel(a, b, 9.0, 3) == doctest::Approx(kernel(ar, br, 9.0, 3)).epsilon(1e-12));
  }
}

TEST_CASE("gram matrix") {
  const auto one = gram_matrix({{0.2, 0.1, 0}}, 10.0, 2);
  REQUIRE(one.dim() == 1);
  CHECK(one(0, 0) == Complex(1.0));
  const auto two = gram_matrix({{0.2, 0.1, 0}, {0.2, 0.1, 0}}, 10.0, 2);
  CHECK(oracle::max_abs(two.matrix() - ComplexMatrix::Ones(2, 2)) == 0.0);

  for (double f : {100.0, 320.0, 600.0, 1000.0}) {
    const auto k = gram_matrix(paper().error_mics, at(f).wavenumber, 2);
    CHECK(k.dim() == 24);
    for (Eigen::Index i = 0; i < 24; ++i) CHECK(k(i, i) == Complex(1.0));
    CHECK(math::hermitian_eigenvalues(k).minCoeff() >= -1e-10);
  }
}

TEST_CASE("disk quadrature integrates the constant exactly") {
  for (double h : {0.1, 0.037, 0.0063}) {
    const QuadratureRule rule = disk_quadrature({0, 0, 0}, 0.5, h);
    CHECK(rule.total_weight() == doctest::Approx(kPi * 0.25).epsilon(1e-3));
    for (const auto& p : rule.nodes) CHECK(norm(p) < 0.5 + h);
  }
  CHECK(region_quadrature(paper()).total_weight() == doctest::Approx(kPi * 0.25).epsilon(1e-3));
  const QuadratureRule ball = ball_quadrature({0, 0, 0}, 0.5, 12);
  CHECK(ball.total_weight() == doctest::Approx(4.0 / 3.0 * kPi * 0.125).epsilon(1e-10));
}

TEST_CASE("single-mic A_int equals the scaled kernel energy") {
  Scene s = paper();
  s.error_mics = {{0.13, -0.21, 0}};
  const auto ctx = at(600.0);
  const double ridge = 1e-3;
  const auto op = interior_energy_matrix(s, ctx, ridge);
  const double k = ctx.wavenumber;
  const Position mic = s.error_mics[0];
  // Ten times the radial and angular resolution needed for this integrand.
  const double q = polar_integral(
      [&](double x, double y) {
        const double j = std::cyl_bessel_j(0.0, k * std::hypot(x - mic.x, y - mic.y));
        return j * j;
      },
      0.5, 400, 4000);
  CHECK(q > 0.0);
  CHECK(op.a_int(0, 0).real() == doctest::Approx(q / ((1 + ridge) * (1 + ridge))).epsilon(1e-3));
}

TEST_CASE("A_int self-convergence under quadrature refinement") {
  const auto ctx = at(600.0);
  QuadratureSpec base, fine;
  fine.refinement = 2 * base.refinement;
  const double n1 = math::spectral_norm(interior_energy_matrix(paper(), ctx, 1e-3, base).a_int.matrix());
  const double n2 = math::spectral_norm(interior_energy_matrix(paper(), ctx, 1e-3, fine).a_int.matrix());
  CHECK(std::fabs(n1 - n2) / n2 < 1e-3);
}

TEST_CASE("A_int is positive semidefinite") {
  oracle::Rng rng(31);
  for (double f : {100.0, 600.0, 1000.0}) {
    const auto op = interior_energy_matrix(paper(), at(f), 1e-3);
    for (int i = 0; i < 100; ++i) CHECK(op.a_int.quadratic_form(rng.vector(24)) >= -1e-12);
    CHECK(math::hermitian_eigenvalues(op.a_int).minCoeff() >= -1e-10);
  }
}

TEST_CASE("estimate_field") {
  const auto ctx = at(600.0);
  const auto op = interior_energy_matrix(paper(), ctx, 1e-3);
  const auto& mics = paper().error_mics;
  CHECK(estimate_field(op, mics, ComplexVector::Zero(24), {0.1, 0.1, 0}) == Complex(0.0));

  // Without ridge the predictor reproduces the samples. Use a sparse ring so
  // that K is well conditioned and the check is not limited by round-off.
  Scene sparse = paper();
  sparse.error_mics.clear();
  for (int i = 0; i < 8; ++i) {
    const double t = 2 * kPi * i / 8;
    sparse.error_mics.push_back({0.5 * std::cos(t), 0.5 * std::sin(t), 0});
  }
  const auto exact = interior_energy_matrix(sparse, ctx, 0.0);
  REQUIRE(math::condition_number_l2(exact.gram) < 1e6);
  oracle::Rng rng(9);
  const ComplexVector e = rng.vector(8);
  for (std::size_t i = 0; i < sparse.error_mics.size(); ++i) {
    CHECK(std::abs(estimate_field(exact, sparse.error_mics, e, sparse.error_mics[i]) -
                   e(static_cast<Eigen::Index>(i))) <= 1e-10);
  }
}

TEST_CASE("energy of the estimated field matches the quadratic form") {
  oracle::Rng rng(10);
  const Scene& s = paper();
  for (double f : {200.0, 600.0, 1000.0}) {
    const auto op = interior_energy_matrix(s, at(f), 1e-3);
    for (int trial = 0; trial < 3; ++trial) {
      const ComplexVector e = rng.vector(24);
      const double form = op.a_int.quadratic_form(e);
      const double polar = polar_integral(
          [&](double x, double y) { return std::norm(estimate_field(op, s.error_mics, e, {x, y, 0})); }, 0.5, 120,
          600);
      CHECK(polar == doctest::Approx(form).epsilon(5e-3));

      // The 1240-point eval grid is a much coarser rule: its own midpoint
      // error near the boundary reaches ~0.7% at 600 Hz.
      double grid = 0.0;
      for (const auto& p : s.eval_points) grid += std::norm(estimate_field(op, s.error_mics, e, p));
      grid *= s.eval_spacing * s.eval_spacing;
      CHECK(grid == doctest::Approx(form).epsilon(1e-2));
    }
  }
}

TEST_CASE("coincident mics without ridge are singular") {
  Scene s = paper();
  s.error_mics = {{0.1, 0.0, 0}, {0.1, 0.0, 0}};
  try {
    interior_energy_matrix(s, at(600.0), 0.0);
    FAIL("expected Singular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
  CHECK_NOTHROW(interior_energy_matrix(s, at(600.0), 1e-3));
}
