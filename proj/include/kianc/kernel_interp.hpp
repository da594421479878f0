// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "kianc/acoustics.hpp"
#include "kianc/math.hpp"

namespace kianc {

/// J0(k|r - r2|) in 2D, j0(k|r - r2|) in 3D.
double kernel(const Position& r, const Position& r2, double wavenumber, int dimension);

math::HermitianMatrix gram_matrix(const std::vector<Position>& mics, double wavenumber, int dimension);

/// Gauss-Legendre nodes and weights of order n on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Weighted nodes for integrating over the target region.
struct QuadratureRule {
  std::vector<Position> nodes;
  std::vector<double> weights;

  double total_weight() const;
};

/// Midpoint rule on the half-offset square lattice of the given spacing. Cells
/// cut by the circle keep their centre as node and carry the exact area of the
/// part inside the disk, so the weights sum to pi r^2 up to round-off.
QuadratureRule disk_quadrature(const Position& center, double radius, double spacing);

/// Product Gauss rule on a ball: Gauss-Legendre in radius and cos(theta),
/// uniform in azimuth with 2 * order points.
QuadratureRule ball_quadrature(const Position& center, double radius, int order);

struct QuadratureSpec {
  /// 2D lattice spacing is the eval-grid spacing divided by this factor.
  int refinement = 4;
  /// Gauss order per axis in 3D.
  int ball_order = 24;

  bool operator==(const QuadratureSpec&) const = default;
};

QuadratureRule region_quadrature(const Scene& scene, const QuadratureSpec& spec = {});

/// Kernel ridge regression machinery for one frequency.
struct InterpolationOperator {
  int dimension = 2;
  double wavenumber = 0.0;
  double ridge = 0.0;
  math::HermitianMatrix gram;     // K
  ComplexMatrix regularized_inverse;  // P = (K + ridge I)^{-1}
  math::HermitianMatrix a_int;    // P^H (int kappa* kappa^T) P
};

/// Builds K, P and A_int. A_int is assembled as B^H B with
/// B = diag(sqrt(w)) Phi P, Phi(q, m) = kappa(node_q, mic_m), which keeps it
/// positive semidefinite to round-off. Throws Error(Singular) when
/// K + ridge I cannot be factored.
InterpolationOperator interior_energy_matrix(const Scene& scene, const FrequencyContext& ctx, double ridge,
                                             const QuadratureRule& quadrature);
InterpolationOperator interior_energy_matrix(const Scene& scene, const FrequencyContext& ctx, double ridge,
                                             const QuadratureSpec& spec = {});

/// Kernel ridge predictor kappa(r)^T P e.
Complex estimate_field(const InterpolationOperator& op, const std::vector<Position>& mics,
                       const ComplexVector& e, const Position& r);

}  // namespace kianc
