// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kianc/acoustics.hpp"
#include "kianc/error.hpp"
#include "oracles.hpp"

using namespace kianc;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected kianc::Error");
  return ErrorCode::Io;
}

const Scene& paper() {
  static const Scene scene = build_scene_paper();
  return scene;
}

}  // namespace

TEST_CASE("3D Green's function has unit magnitude at d = 1/(4 pi) in the static limit") {
  const auto ctx = make_frequency_context(1e-9, 340.0, 1.3);
  const Complex g = green({1.0 / (4 * kPi), 0, 0}, {0, 0, 0}, ctx, 3);
  CHECK(std::abs(g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2D Green's function magnitude is |H0|/4") {
  const auto ctx = make_frequency_context(600.0, 340.0, 1.3);
  oracle::Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Position a{rng.uniform(-2, 2), rng.uniform(-2, 2), 0};
    const Position b{rng.uniform(-2, 2), rng.uniform(-2, 2), 0};
    const double kd = ctx.wavenumber * distance(a, b);
    const double j = std::cyl_bessel_j(0.0, kd), y = std::cyl_neumann(0.0, kd);
    CHECK(std::abs(green(a, b, ctx, 2)) == doctest::Approx(0.25 * std::hypot(j, y)).epsilon(1e-10));
    CHECK(std::abs(green(a, b, ctx, 2) - green(b, a, ctx, 2)) == 0.0);
    CHECK(std::abs(green(a, b, ctx, 3) - green(b, a, ctx, 3)) == 0.0);
  }
}

TEST_CASE("coincident points are rejected") {
  const auto ctx = make_frequency_context(600.0, 340.0, 1.3);
  CHECK(code_of([&] { green({0.3, 0.1, 0}, {0.3, 0.1, 0}, ctx, 2); }) == ErrorCode::Domain);
  CHECK(code_of([&] { green({0.3, 0.1, 0.2}, {0.3, 0.1, 0.2}, ctx, 3); }) == ErrorCode::Domain);
}

TEST_CASE("2D far-field amplitude decays as 1/sqrt(d)") {
  const auto ctx = make_frequency_context(600.0, 340.0, 1.3);
  const double k = ctx.wavenumber;
  const double expected = std::sqrt(1.0 / (8 * kPi * k));
  for (double kd : {101.0, 250.0, 1000.0, 5000.0}) {
    const double d = kd / k;
    CHECK(std::abs(green({d, 0, 0}, {0, 0, 0}, ctx, 2)) * std::sqrt(d) == doctest::Approx(expected).epsilon(0.01));
  }
}

TEST_CASE("paper scene layout") {
  const Scene& s = paper();
  CHECK(s.dimension == 2);
  CHECK(s.secondary_sources.size() == 12);
  CHECK(s.error_mics.size() == 24);
  CHECK(s.reference_count == 1);
  CHECK(s.sound_speed == 340.0);
  CHECK(s.air_density == 1.3);
  CHECK(s.eval_points.size() == 1240);
  for (const auto& p : s.eval_points) CHECK(norm(p) <= 0.5);
  double min_gap = 1e9;
  for (const auto& src : s.secondary_sources) min_gap = std::min(min_gap, norm(src) - 0.5);
  CHECK(min_gap == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s.primary_source == Position{-3.0, 0.2, 0.0});
  CHECK_NOTHROW(validate_scene(s));
}

TEST_CASE("ring offset rotates every second ring") {
  SceneLayout layout;
  layout.ring_offset = 0.5;
  const Scene s = build_scene(layout);
  const Scene aligned = paper();
  const double step = 2 * kPi / 6;
  const Position inner = s.secondary_sources[0], outer = s.secondary_sources[6];
  CHECK(std::atan2(outer.y, outer.x) - std::atan2(inner.y, inner.x) == doctest::Approx(0.5 * step).epsilon(1e-12));
  CHECK(aligned.secondary_sources[6].y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("lattice spacing yields the requested count") {
  const double h = find_lattice_spacing(0.5, 1240, 2);
  CHECK(lattice_in_ball({0, 0, 0}, 0.5, h, 2).size() == 1240);
  CHECK(h == doctest::Approx(0.025).epsilon(0.02));
  for (double probe : {0.09, 0.031, 0.0107}) {
    const std::size_t count = lattice_in_ball({0, 0, 0}, 0.5, probe, 2).size();
    const double hc = find_lattice_spacing(0.5, count, 2);
    CHECK(lattice_in_ball({0, 0, 0}, 0.5, hc, 2).size() == count);
  }
  try {
    find_lattice_spacing(0.5, 1241, 2);
    FAIL("a count that is not a multiple of four cannot be reached");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Validation);
  }
}

TEST_CASE("transfer matrix") {
  const auto ctx = make_frequency_context(600.0, 340.0, 1.3);
  Scene one;
  one.secondary_sources = {{0.9, 0.3, 0}};
  one.error_mics = {{0.1, -0.2, 0}};
  const ComplexMatrix g1 = transfer_matrix(one, ctx);
  REQUIRE(g1.rows() == 1);
  REQUIRE(g1.cols() == 1);
  CHECK(g1(0, 0) == green(one.error_mics[0], one.secondary_sources[0], ctx, 2));

  const ComplexMatrix g = transfer_matrix(paper(), ctx);
  CHECK(g.rows() == 24);
  CHECK(g.cols() == 12);
  CHECK(g.allFinite());

  Scene swapped = paper();
  std::swap(swapped.secondary_sources[2], swapped.secondary_sources[9]);
  const ComplexMatrix gs = transfer_matrix(swapped, ctx);
  CHECK(gs.col(2) == g.col(9));
  CHECK(gs.col(9) == g.col(2));
  CHECK(gs.col(0) == g.col(0));
}

TEST_CASE("total field") {
  const auto ctx = make_frequency_context(600.0, 340.0, 1.3);
  const Scene& s = paper();
  const ComplexVector primary = point_source_field(s.eval_points, s.primary_source, ctx, 2);
  const ComplexVector zero = ComplexVector::Zero(12);
  CHECK(oracle::max_abs(evaluate_total_field(s, ctx, zero, 1.0) - primary) == 0.0);

  ComplexVector e1 = zero;
  e1(0) = 1.0;
  const ComplexVector col = point_source_field(s.eval_points, s.secondary_sources[0], ctx, 2);
  CHECK(oracle::max_abs(evaluate_total_field(s, ctx, e1, 0.0) - col) <= 1e-15);

  oracle::Rng rng(8);
  const ComplexVector y1 = rng.vector(12), y2 = rng.vector(12);
  const ComplexVector lhs = evaluate_total_field(s, ctx, y1 + y2, 1.0);
  const ComplexVector rhs = evaluate_total_field(s, ctx, y1, 1.0) + evaluate_total_field(s, ctx, y2, 1.0) - primary;
  CHECK(oracle::max_abs(lhs - rhs) <= 1e-12 * oracle::max_abs(lhs));

  const Complex a{0.3, -1.2}, s1{-0.7, 0.4};
  const ComplexVector scaled = evaluate_total_field(s, ctx, a * y1, a * s1);
  CHECK(oracle::max_abs(scaled - a * evaluate_total_field(s, ctx, y1, s1)) <= 1e-12 * oracle::max_abs(scaled));
}

TEST_CASE("regional power reduction") {
  oracle::Rng rng(4);
  const ComplexVector u = rng.vector(40);
  CHECK(regional_power_reduction(u, u) == 0.0);
  CHECK(regional_power_reduction(u / std::sqrt(10.0), u) == doctest::Approx(-10.0).epsilon(1e-12));
  const double zero = regional_power_reduction(ComplexVector::Zero(40), u);
  CHECK(std::isinf(zero));
  CHECK(zero < 0);
  CHECK(code_of([&] { regional_power_reduction(u.head(3), u); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { regional_power_reduction(u, ComplexVector::Zero(40)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("PowerReduction agrees with the direct field evaluation") {
  const auto ctx = make_frequency_context(450.0, 340.0, 1.3);
  const FieldModel model(paper(), ctx);
  const ComplexVector primary = model.primary_at_eval(paper().primary_source);
  const PowerReduction pr(model.eval_transfer(), primary);
  oracle::Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    const ComplexVector y = 0.05 * rng.vector(12);
    const Complex s = rng.cnormal();
    const double direct = regional_power_reduction(evaluate_total_field(paper(), ctx, y, s), primary);
    CHECK(pr.reduction_db(y, s) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("scene validation") {
  CHECK(code_of([] {
          Scene s = build_scene_paper();
          s.dimension = 4;
          validate_scene(s);
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          Scene s = build_scene_paper();
          s.secondary_sources[3] = {0.2, 0.0, 0.0};
          validate_scene(s);
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          Scene s = build_scene_paper();
          s.error_mics[0] = s.secondary_sources[0];
          validate_scene(s);
        }) == ErrorCode::Validation);
  CHECK(code_of([] {
          Scene s = build_scene_paper();
          s.eval_points.push_back({0.6, 0.0, 0.0});
          validate_scene(s);
        }) == ErrorCode::Validation);
  CHECK(code_of([] { make_frequency_context(0.0, 340.0, 1.3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("3D scene builds with points inside the ball") {
  SceneLayout layout;
  layout.dimension = 3;
  layout.eval_point_count = lattice_in_ball({0, 0, 0}, 0.5, 0.08, 3).size();
  const Scene s = build_scene(layout);
  CHECK(s.eval_points.size() == layout.eval_point_count);
  for (const auto& p : s.eval_points) CHECK(norm(p) < 0.5);
  CHECK_NOTHROW(validate_scene(s));
}
