// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "kianc/error.hpp"
#include "kianc/kernel_interp.hpp"
#include "kianc/radiation.hpp"
#include "oracles.hpp"

using namespace kianc;

namespace {

const Scene& paper() {
  static const Scene scene = build_scene_paper();
  return scene;
}

FrequencyContext at(double f) { return make_frequency_context(f, 340.0, 1.3); }

double min_eig(const math::HermitianMatrix& a) {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(a.matrix()).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("single source radiation") {
  const auto ctx = at(600.0);
  const double expected = 1.0 / (8 * 1.3 * 340.0 * ctx.wavenumber);
  const auto op = radiation_matrix({{1.0, 0.0, 0.0}}, ctx, 2);
  REQUIRE(op.a_ext.dim() == 1);
  CHECK(op.a_ext(0, 0).real() == doctest::Approx(expected).epsilon(1e-14));
  const Complex a{0.6, -1.7};
  ComplexVector y(1);
  y << a;
  CHECK(exterior_power(op, y) == doctest::Approx(std::norm(a) * expected).epsilon(1e-14));
  CHECK(exterior_power(op, ComplexVector::Zero(1)) == 0.0);
}

TEST_CASE("sources one J0 zero apart are uncoupled") {
  const auto ctx = at(600.0);
  const double d = 2.404825557695773 / ctx.wavenumber;
  const auto op = radiation_matrix({{1.0, 0.0, 0.0}, {1.0, d, 0.0}}, ctx, 2);
  CHECK(std::abs(op.a_ext(0, 1)) <= 1e-9 * op.a_ext(0, 0).real());
}

TEST_CASE("A_ext is positive semidefinite and quadratic in the drive") {
  oracle::Rng rng(21);
  for (double f : {100.0, 320.0, 600.0, 1000.0}) {
    const auto op = radiation_matrix(paper().secondary_sources, at(f), 2);
    CHECK(math::hermitian_eigenvalues(op.a_ext).minCoeff() >= -1e-10);
    for (int i = 0; i < 100; ++i) CHECK(exterior_power(op, rng.vector(12)) >= -1e-12);
    const ComplexVector y = rng.vector(12);
    const Complex c{-2.5, 0.75};
    CHECK(exterior_power(op, c * y) == doctest::Approx(std::norm(c) * exterior_power(op, y)).epsilon(1e-12));
  }
}

TEST_CASE("diagonal loading") {
  RadiationOperator id;
  id.a_ext = math::HermitianMatrix::identity(4);
  id.a_ext_algorithm = id.a_ext;
  const auto same = maybe_load(id);
  CHECK_FALSE(same.loaded);
  CHECK(same.condition_number == doctest::Approx(1.0));
  CHECK(oracle::max_abs(same.a_ext_algorithm.matrix() - id.a_ext.matrix()) == 0.0);

  const auto raw = radiation_matrix(paper().secondary_sources, at(100.0), 2);
  const RealVector eig = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(raw.a_ext.matrix()).eigenvalues();
  CHECK(eig.cwiseAbs().maxCoeff() / eig.cwiseAbs().minCoeff() > 1e2);
  const auto loaded = maybe_load(raw);
  CHECK(loaded.loaded);
  CHECK(loaded.condition_number > 1e2);
  CHECK(min_eig(loaded.a_ext_algorithm) - min_eig(loaded.a_ext) == doctest::Approx(loaded.eta).epsilon(1e-6));
  CHECK(oracle::max_abs(loaded.a_ext.matrix() - raw.a_ext.matrix()) == 0.0);
  const ComplexVector y = ComplexVector::Ones(12);
  CHECK(exterior_power(loaded, y) == exterior_power(raw, y));
}

TEST_CASE("Wiener reference") {
  const auto ctx = at(600.0);
  const FieldModel field(paper(), ctx);
  const ComplexMatrix& g = field.mic_transfer();
  const auto a_int = interior_energy_matrix(paper(), ctx, 1e-3).a_int;
  const auto rad = maybe_load(radiation_matrix(paper().secondary_sources, ctx, 2));
  const ComplexVector d = field.primary_at_mics(paper().primary_source);

  const auto none = wiener_reference(g, a_int, ComplexVector::Zero(24), rad);
  CHECK(none.y_opt.norm() == 0.0);
  CHECK(none.j_ext_hat == 0.0);

  const auto w = wiener_reference(g, a_int, d, rad);
  CHECK(w.j_ext_hat > 0.0);
  const ComplexVector rhs = g.adjoint() * (a_int.matrix() * d);
  const ComplexVector grad = g.adjoint() * (a_int.matrix() * (d + g * w.y_opt));
  CHECK(grad.norm() <= 1e-9 * rhs.norm());

  for (double c : {1e-3, 7.0, 1e4}) {
    const auto ws = wiener_reference(g, a_int.scaled(c), d, rad);
    CHECK((ws.y_opt - w.y_opt).norm() <= 1e-8 * w.y_opt.norm());
  }
}
