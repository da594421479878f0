// SPDX-License-Identifier: Apache-2.0

#include "kianc/kernel_interp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kianc/error.hpp"

namespace kianc {

namespace {

// Area of {x^2 + y^2 < R^2, x < a, y < b}.
class DiskCornerArea {
 public:
  explicit DiskCornerArea(double radius) : r_(radius) {}

  double operator()(double a, double b) const {
    a = std::clamp(a, -r_, r_);
    if (b <= -r_) return 0.0;
    if (b >= r_) return 2.0 * (primitive(a) - primitive(-r_));
    const double xb = std::sqrt(r_ * r_ - b * b);
    // Outside |x| < xb the chord half-length is below |b|, so the strip is
    // either the full chord (b > 0) or empty (b < 0).
    const double outer = b > 0.0 ? 2.0 : 0.0;
    return outer * span(-r_, -xb, a) + chord_below(-xb, xb, a, b) + outer * span(xb, r_, a);
  }

 private:
  double primitive(double x) const {
    x = std::clamp(x, -r_, r_);
    return 0.5 * (x * std::sqrt(std::max(r_ * r_ - x * x, 0.0)) + r_ * r_ * std::asin(x / r_));
  }
  // integral of the half chord over [lo, min(hi, a)]
  double span(double lo, double hi, double a) const {
    hi = std::min(hi, a);
    return hi > lo ? primitive(hi) - primitive(lo) : 0.0;
  }
  double chord_below(double lo, double hi, double a, double b) const {
    hi = std::min(hi, a);
    return hi > lo ? b * (hi - lo) + primitive(hi) - primitive(lo) : 0.0;
  }

  double r_;
};

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

double kernel(const Position& r, const Position& r2, double wavenumber, int dimension) {
  const double kd = wavenumber * distance(r, r2);
  return dimension == 2 ? math::bessel_j0(kd) : math::sinc_j0(kd);
}

math::HermitianMatrix gram_matrix(const std::vector<Position>& mics, double wavenumber, int dimension) {
  if (mics.empty()) throw Error(ErrorCode::InvalidArgument, "gram_matrix: no microphones");
  const auto m = static_cast<Eigen::Index>(mics.size());
  ComplexMatrix k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = kernel(mics[i], mics[j], wavenumber, dimension);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return math::HermitianMatrix(k);
}

double QuadratureRule::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

QuadratureRule disk_quadrature(const Position& center, double radius, double spacing) {
  if (!(radius > 0.0) || !(spacing > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "disk_quadrature: radius and spacing must be positive");
  }
  const DiskCornerArea corner(radius);
  const double r2 = radius * radius;
  const double half = 0.5 * spacing;
  const long n = static_cast<long>(std::ceil(radius / spacing)) + 1;
  QuadratureRule rule;
  for (long i = -n; i < n; ++i) {
    const double cx = (i + 0.5) * spacing;
    for (long j = -n; j < n; ++j) {
      const double cy = (j + 0.5) * spacing;
      const double nx = std::max(0.0, std::abs(cx) - half), ny = std::max(0.0, std::abs(cy) - half);
      if (nx * nx + ny * ny >= r2) continue;
      const double fx = std::abs(cx) + half, fy = std::abs(cy) + half;
      double w;
      if (fx * fx + fy * fy <= r2) {
        w = spacing * spacing;
      } else {
        const double x0 = cx - half, x1 = cx + half, y0 = cy - half, y1 = cy + half;
        w = corner(x1, y1) - corner(x0, y1) - corner(x1, y0) + corner(x0, y0);
      }
      if (w <= 0.0) continue;
      rule.nodes.push_back({center.x + cx, center.y + cy, center.z});
      rule.weights.push_back(w);
    }
  }
  return rule;
}

QuadratureRule ball_quadrature(const Position& center, double radius, int order) {
  if (order < 1 || !(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball_quadrature: bad order or radius");
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  const int n_phi = 2 * order;
  QuadratureRule rule;
  for (int a = 0; a < order; ++a) {
    const double r = 0.5 * radius * (gx[a] + 1.0);
    const double wr = 0.5 * radius * gw[a] * r * r;
    for (int b = 0; b < order; ++b) {
      const double ct = gx[b];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int c = 0; c < n_phi; ++c) {
        const double phi = 2.0 * std::numbers::pi * c / n_phi;
        rule.nodes.push_back({center.x + r * st * std::cos(phi), center.y + r * st * std::sin(phi), center.z + r * ct});
        rule.weights.push_back(wr * gw[b] * 2.0 * std::numbers::pi / n_phi);
      }
    }
  }
  return rule;
}

QuadratureRule region_quadrature(const Scene& scene, const QuadratureSpec& spec) {
  if (scene.dimension == 2) {
    if (spec.refinement < 1) throw Error(ErrorCode::InvalidArgument, "quadrature refinement must be >= 1");
    double spacing = scene.eval_spacing;
    if (!(spacing > 0.0)) spacing = scene.target_radius / 20.0;
    return disk_quadrature(scene.target_center, scene.target_radius, spacing / spec.refinement);
  }
  return ball_quadrature(scene.target_center, scene.target_radius, spec.ball_order);
}

InterpolationOperator interior_energy_matrix(const Scene& scene, const FrequencyContext& ctx, double ridge,
                                             const QuadratureRule& quadrature) {
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge parameter must be non-negative");
  InterpolationOperator op;
  op.dimension = scene.dimension;
  op.wavenumber = ctx.wavenumber;
  op.ridge = ridge;
  op.gram = gram_matrix(scene.error_mics, ctx.wavenumber, scene.dimension);

  const Eigen::Index m = op.gram.dim();
  try {
    op.regularized_inverse =
        math::hermitian_solve(op.gram.shifted(ridge), ComplexMatrix::Identity(m, m));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    throw Error(ErrorCode::Singular, "interior_energy_matrix: K + ridge*I is singular");
  }

  const auto nq = static_cast<Eigen::Index>(quadrature.nodes.size());
  Eigen::MatrixXd phi(nq, m);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double sw = std::sqrt(quadrature.weights[q]);
    for (Eigen::Index j = 0; j < m; ++j) {
      phi(q, j) = sw * kernel(quadrature.nodes[q], scene.error_mics[j], ctx.wavenumber, scene.dimension);
    }
  }
  const ComplexMatrix b = phi.cast<Complex>() * op.regularized_inverse;
  op.a_int = math::HermitianMatrix(b.adjoint() * b);
  return op;
}

InterpolationOperator interior_energy_matrix(const Scene& scene, const FrequencyContext& ctx, double ridge,
                                             const QuadratureSpec& spec) {
  return interior_energy_matrix(scene, ctx, ridge, region_quadrature(scene, spec));
}

Complex estimate_field(const InterpolationOperator& op, const std::vector<Position>& mics,
                       const ComplexVector& e, const Position& r) {
  const auto m = static_cast<Eigen::Index>(mics.size());
  if (e.size() != m || op.regularized_inverse.rows() != m) {
    throw Error(ErrorCode::InvalidArgument, "estimate_field: dimension mismatch");
  }
  ComplexVector kappa(m);
  for (Eigen::Index j = 0; j < m; ++j) kappa(j) = kernel(r, mics[j], op.wavenumber, op.dimension);
  return (kappa.transpose() * (op.regularized_inverse * e))(0, 0);
}

}  // namespace kianc
