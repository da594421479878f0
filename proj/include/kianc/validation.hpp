// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kianc/harness.hpp"

namespace kianc {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  double frequency_hz = 0.0;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::size_t failed() const;
  /// One "PASS|FAIL name measured=... tolerance=..." line per check.
  std::string text() const;
  std::string json() const;
};

/// Net power flowing out through a circle (2D) or sphere (3D) of the given
/// radius around the target centre, (1 / 2 rho w) * integral of Im(p* dp/dn),
/// for secondary drives y. Trapezoid rule in angle, Gauss-Legendre in polar
/// angle for 3D.
double surface_radiated_power(const Scene& scene, const FrequencyContext& ctx, const ComplexVector& y, double radius,
                              int angular_nodes = 2048);

/// Oracle and invariant checks on the operators of one frequency.
ValidationReport run_validation(const ExperimentSetup& setup, double frequency_hz, std::uint64_t seed);

/// G, A_int, A_ext (reported and algorithm versions), the Wiener drive and the
/// calibration scalars as JSON.
std::string operators_json(const FrequencyOperators& ops);

}  // namespace kianc
