// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "kianc/acoustics.hpp"
#include "kianc/math.hpp"

namespace kianc {

struct RadiationOptions {
  double cond_threshold = 1e2;
  double eta = 1e-5;

  bool operator==(const RadiationOptions&) const = default;
};

/// Exterior radiation power operator for point secondary sources.
///
/// `a_ext` is always the physical matrix and is what exterior_power()
/// reports. `a_ext_algorithm` is what the update rules use: a_ext + eta I
/// once maybe_load() has decided the conditioning requires it, a_ext
/// otherwise.
struct RadiationOperator {
  math::HermitianMatrix a_ext;
  math::HermitianMatrix a_ext_algorithm;
  bool loaded = false;
  double eta = 1e-5;
  double cond_threshold = 1e2;
  double condition_number = 0.0;  // of a_ext; filled by maybe_load
};

/// (l, l') = J0(k |r_l - r_l'|) / (8 rho c k) in 2D, j0 variant in 3D.
RadiationOperator radiation_matrix(const std::vector<Position>& sources, const FrequencyContext& ctx,
                                   int dimension, const RadiationOptions& options = {});

/// Diagonal loading when cond_2(A_ext) exceeds the threshold.
RadiationOperator maybe_load(RadiationOperator op);

/// y^H A_ext y with the unloaded matrix, in W per unit source strength
/// squared. Round-off negatives are clamped to zero.
double exterior_power(const RadiationOperator& op, const ComplexVector& y);

struct WienerReference {
  ComplexVector y_opt;
  double j_ext_hat = 0.0;
  bool regularized = false;  // trace-scaled loading was needed
};

/// Minimizer of (d + G y)^H A_int (d + G y) and its exterior power.
/// Falls back to 1e-12 trace-scaled loading when G^H A_int G is not
/// numerically positive definite; throws Error(Singular) if that fails too.
WienerReference wiener_reference(const ComplexMatrix& g, const math::HermitianMatrix& a_int,
                                 const ComplexVector& d_clean, const RadiationOperator& radiation);

}  // namespace kianc
