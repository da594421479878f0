// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "kianc/math.hpp"

namespace kianc {

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);
double norm(const Position& p);

/// Geometry and medium of one free-field ANC setup. `dimension` is 2 or 3;
/// in 2D every z coordinate is zero.
struct Scene {
  int dimension = 2;
  Position target_center;
  double target_radius = 0.5;
  std::vector<Position> secondary_sources;
  std::vector<Position> error_mics;
  int reference_count = 1;
  Position primary_source;
  std::vector<Position> eval_points;
  double eval_spacing = 0.0;  // lattice spacing of eval_points, 0 if not a lattice
  double sound_speed = 340.0;
  double air_density = 1.3;
};

/// Throws Error(Validation) describing the first violated invariant.
void validate_scene(const Scene& scene);

struct FrequencyContext {
  double frequency_hz = 0.0;
  double angular_frequency = 0.0;
  double wavenumber = 0.0;
  double sound_speed = 0.0;
  double air_density = 0.0;
};

FrequencyContext make_frequency_context(double frequency_hz, double sound_speed, double air_density);
FrequencyContext make_frequency_context(const Scene& scene, double frequency_hz);

/// Outgoing free-field Green's function for the e^{-jwt} time convention:
/// (j/4) H0^(1)(k d) in 2D, e^{jkd} / (4 pi d) in 3D. Throws Error(Domain)
/// for coincident points.
Complex green(const Position& r, const Position& source, const FrequencyContext& ctx, int dimension);

/// Concentric-ring layout from which a Scene is generated.
struct SceneLayout {
  int dimension = 2;
  double target_radius = 0.5;
  std::vector<double> source_radii{0.9, 1.1};
  int sources_per_ring = 6;
  std::vector<double> mic_radii{0.47, 0.53};
  int mics_per_ring = 12;
  /// Rotation of every second ring, as a fraction of that ring's angular step.
  double ring_offset = 0.0;
  Position primary_source{-3.0, 0.2, 0.0};
  int reference_count = 1;
  std::size_t eval_point_count = 1240;
  double sound_speed = 340.0;
  double air_density = 1.3;

  bool operator==(const SceneLayout&) const = default;
};

Scene build_scene(const SceneLayout& layout);

/// The 2D experiment geometry: L = 12, M = 24, R = 1, 1240 eval points.
Scene build_scene_paper();

/// Points of the half-cell-offset lattice {((i+1/2)h, (j+1/2)h)} (plus the z
/// layer in 3D) lying strictly inside the disk/ball.
std::vector<Position> lattice_in_ball(const Position& center, double radius, double spacing, int dimension);

/// Spacing at the midpoint of the interval of spacings for which the lattice
/// holds exactly `count` points. Throws Error(Validation) if no spacing does.
double find_lattice_spacing(double radius, std::size_t count, int dimension);

/// (m, l) = green(mic_m, source_l); shape M x L.
ComplexMatrix transfer_matrix(const Scene& scene, const FrequencyContext& ctx);

/// green(point_j, source) for each point.
ComplexVector point_source_field(const std::vector<Position>& points, const Position& source,
                                 const FrequencyContext& ctx, int dimension);

/// u(r_j) = s green(r_j, primary) + sum_l y_l green(r_j, source_l).
ComplexVector evaluate_total_field(const Scene& scene, const FrequencyContext& ctx,
                                   const ComplexVector& y, Complex s);

/// 10 log10(sum |u_total|^2 / sum |u_primary|^2); -infinity for a zero total
/// field. Throws Error(InvalidArgument) on a length mismatch or zero primary.
double regional_power_reduction(const ComplexVector& u_total, const ComplexVector& u_primary);

/// Propagation model for one scene and frequency: transfer matrices to the
/// error mics and to the eval grid.
class FieldModel {
 public:
  FieldModel(const Scene& scene, const FrequencyContext& ctx);

  const Scene& scene() const { return scene_; }
  const FrequencyContext& context() const { return ctx_; }
  const ComplexMatrix& mic_transfer() const { return mic_transfer_; }
  const ComplexMatrix& eval_transfer() const { return eval_transfer_; }

  ComplexVector primary_at_mics(const Position& source) const;
  ComplexVector primary_at_eval(const Position& source) const;

 private:
  Scene scene_;
  FrequencyContext ctx_;
  ComplexMatrix mic_transfer_;
  ComplexMatrix eval_transfer_;
};

/// P_red for a fixed primary field, as the quadratic form
/// |u_p|^2 + 2 Re(y^H G^H u_p s) + y^H G^H G y |s|^2 over the eval grid.
class PowerReduction {
 public:
  PowerReduction(const ComplexMatrix& eval_transfer, const ComplexVector& primary_field);

  double reduction_db(const ComplexVector& y, Complex s = 1.0) const;

 private:
  double primary_power_;
  ComplexVector cross_;
  math::HermitianMatrix gram_;
};

}  // namespace kianc
