// SPDX-License-Identifier: Apache-2.0

#include "kianc/acoustics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kianc/error.hpp"

namespace kianc {

namespace {

[[noreturn]] void invalid_scene(const std::string& what) {
  throw Error(ErrorCode::Validation, "scene: " + what);
}

std::size_t lattice_count(double radius, double spacing, int dimension) {
  const double r2 = radius * radius;
  const long n = static_cast<long>(std::ceil(radius / spacing)) + 1;
  std::size_t count = 0;
  for (long i = -n; i < n; ++i) {
    const double x = (i + 0.5) * spacing;
    for (long j = -n; j < n; ++j) {
      const double y = (j + 0.5) * spacing;
      if (dimension == 2) {
        if (x * x + y * y < r2) ++count;
      } else {
        for (long l = -n; l < n; ++l) {
          const double z = (l + 0.5) * spacing;
          if (x * x + y * y + z * z < r2) ++count;
        }
      }
    }
  }
  return count;
}

std::vector<Position> ring(double radius, int count, double offset_fraction, const Position& c) {
  std::vector<Position> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double angle = 2.0 * std::numbers::pi * (i + offset_fraction) / count;
    out.push_back({c.x + radius * std::cos(angle), c.y + radius * std::sin(angle), c.z});
  }
  return out;
}

}  // namespace

double distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double norm(const Position& p) { return distance(p, Position{}); }

void validate_scene(const Scene& scene) {
  if (scene.dimension != 2 && scene.dimension != 3) invalid_scene("dimension must be 2 or 3");
  if (!(scene.target_radius > 0.0)) invalid_scene("target radius must be positive");
  if (!(scene.sound_speed > 0.0)) invalid_scene("sound speed must be positive");
  if (!(scene.air_density > 0.0)) invalid_scene("air density must be positive");
  if (scene.secondary_sources.empty()) invalid_scene("no secondary sources");
  if (scene.error_mics.empty()) invalid_scene("no error microphones");
  if (scene.reference_count < 1) invalid_scene("reference count must be at least 1");

  const double r = scene.target_radius;
  const double slack = 1e-12 * r;
  auto check_plane = [&](const Position& p, const char* what) {
    if (scene.dimension == 2 && p.z != 0.0) invalid_scene(std::string(what) + " has non-zero z in a 2D scene");
  };
  for (std::size_t i = 0; i < scene.error_mics.size(); ++i) {
    check_plane(scene.error_mics[i], "error mic");
    // Mics may sit slightly outside the region (the 0.53 m ring does); they
    // only must not coincide with a source.
    for (const auto& src : scene.secondary_sources) {
      if (distance(scene.error_mics[i], src) <= slack) invalid_scene("error mic " + std::to_string(i) + " coincides with a secondary source");
    }
    if (distance(scene.error_mics[i], scene.primary_source) <= slack) {
      invalid_scene("error mic " + std::to_string(i) + " coincides with the primary source");
    }
  }
  for (std::size_t i = 0; i < scene.secondary_sources.size(); ++i) {
    check_plane(scene.secondary_sources[i], "secondary source");
    if (distance(scene.secondary_sources[i], scene.target_center) <= r) {
      invalid_scene("secondary source " + std::to_string(i) + " is not strictly outside the target region");
    }
  }
  check_plane(scene.primary_source, "primary source");
  if (distance(scene.primary_source, scene.target_center) <= r) {
    invalid_scene("primary source is not strictly outside the target region");
  }
  for (std::size_t i = 0; i < scene.eval_points.size(); ++i) {
    if (distance(scene.eval_points[i], scene.target_center) > r + slack) {
      invalid_scene("eval point " + std::to_string(i) + " lies outside the target region");
    }
  }
  if (scene.eval_points.empty()) invalid_scene("no evaluation points");
}

FrequencyContext make_frequency_context(double frequency_hz, double sound_speed, double air_density) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw Error(ErrorCode::InvalidArgument, "frequency must be positive and finite");
  }
  if (!(sound_speed > 0.0) || !(air_density > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sound speed and air density must be positive");
  }
  FrequencyContext ctx;
  ctx.frequency_hz = frequency_hz;
  ctx.angular_frequency = 2.0 * std::numbers::pi * frequency_hz;
  ctx.wavenumber = ctx.angular_frequency / sound_speed;
  ctx.sound_speed = sound_speed;
  ctx.air_density = air_density;
  return ctx;
}

FrequencyContext make_frequency_context(const Scene& scene, double frequency_hz) {
  return make_frequency_context(frequency_hz, scene.sound_speed, scene.air_density);
}

Complex green(const Position& r, const Position& source, const FrequencyContext& ctx, int dimension) {
  const double d = distance(r, source);
  if (d == 0.0) throw Error(ErrorCode::Domain, "green: receiver coincides with the source");
  const double kd = ctx.wavenumber * d;
  if (dimension == 2) {
    // (j/4)(J0 + j Y0)
    return Complex(-0.25 * math::bessel_y0(kd), 0.25 * math::bessel_j0(kd));
  }
  return std::polar(1.0 / (4.0 * std::numbers::pi * d), kd);
}

std::vector<Position> lattice_in_ball(const Position& center, double radius, double spacing, int dimension) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "lattice spacing must be positive");
  const double r2 = radius * radius;
  const long n = static_cast<long>(std::ceil(radius / spacing)) + 1;
  std::vector<Position> out;
  for (long i = -n; i < n; ++i) {
    const double x = (i + 0.5) * spacing;
    for (long j = -n; j < n; ++j) {
      const double y = (j + 0.5) * spacing;
      if (dimension == 2) {
        if (x * x + y * y < r2) out.push_back({center.x + x, center.y + y, center.z});
        continue;
      }
      for (long l = -n; l < n; ++l) {
        const double z = (l + 0.5) * spacing;
        if (x * x + y * y + z * z < r2) out.push_back({center.x + x, center.y + y, center.z + z});
      }
    }
  }
  return out;
}

double find_lattice_spacing(double radius, std::size_t count, int dimension) {
  if (count == 0 || !(radius > 0.0)) {
    throw Error(ErrorCode::Validation, "lattice: count and radius must be positive");
  }
  const double measure = dimension == 2 ? std::numbers::pi * radius * radius
                                        : 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  const double guess = std::pow(measure / static_cast<double>(count), 1.0 / dimension);

  // count(h) is non-increasing in h; locate both edges of the plateau.
  auto edge = [&](bool left) {
    double lo = 0.25 * guess, hi = 4.0 * guess;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * guess; ++it) {
      const double mid = 0.5 * (lo + hi);
      const std::size_t c = lattice_count(radius, mid, dimension);
      const bool go_right = left ? (c > count) : (c >= count);
      (go_right ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double left = edge(true);
  const double right = edge(false);
  const double mid = 0.5 * (left + right);
  if (!(right > left) || lattice_count(radius, mid, dimension) != count) {
    std::ostringstream msg;
    msg << "no lattice spacing yields exactly " << count << " points inside radius " << radius;
    throw Error(ErrorCode::Validation, msg.str());
  }
  return mid;
}

Scene build_scene(const SceneLayout& layout) {
  if (layout.dimension != 2 && layout.dimension != 3) invalid_scene("dimension must be 2 or 3");
  if (layout.sources_per_ring < 1 || layout.mics_per_ring < 1) invalid_scene("ring counts must be positive");
  Scene s;
  s.dimension = layout.dimension;
  s.target_radius = layout.target_radius;
  s.reference_count = layout.reference_count;
  s.primary_source = layout.primary_source;
  s.sound_speed = layout.sound_speed;
  s.air_density = layout.air_density;
  for (std::size_t i = 0; i < layout.source_radii.size(); ++i) {
    const double offset = (i % 2 == 1) ? layout.ring_offset : 0.0;
    auto pts = ring(layout.source_radii[i], layout.sources_per_ring, offset, s.target_center);
    s.secondary_sources.insert(s.secondary_sources.end(), pts.begin(), pts.end());
  }
  for (std::size_t i = 0; i < layout.mic_radii.size(); ++i) {
    const double offset = (i % 2 == 1) ? layout.ring_offset : 0.0;
    auto pts = ring(layout.mic_radii[i], layout.mics_per_ring, offset, s.target_center);
    s.error_mics.insert(s.error_mics.end(), pts.begin(), pts.end());
  }
  s.eval_spacing = find_lattice_spacing(layout.target_radius, layout.eval_point_count, layout.dimension);
  s.eval_points = lattice_in_ball(s.target_center, s.target_radius, s.eval_spacing, layout.dimension);
  validate_scene(s);
  return s;
}

Scene build_scene_paper() { return build_scene(SceneLayout{}); }

ComplexVector point_source_field(const std::vector<Position>& points, const Position& source,
                                 const FrequencyContext& ctx, int dimension) {
  ComplexVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) out(j) = green(points[j], source, ctx, dimension);
  return out;
}

ComplexMatrix transfer_matrix(const Scene& scene, const FrequencyContext& ctx) {
  const auto m = static_cast<Eigen::Index>(scene.error_mics.size());
  const auto l = static_cast<Eigen::Index>(scene.secondary_sources.size());
  ComplexMatrix g(m, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    g.col(j) = point_source_field(scene.error_mics, scene.secondary_sources[j], ctx, scene.dimension);
  }
  return g;
}

ComplexVector evaluate_total_field(const Scene& scene, const FrequencyContext& ctx,
                                   const ComplexVector& y, Complex s) {
  if (y.size() != static_cast<Eigen::Index>(scene.secondary_sources.size())) {
    throw Error(ErrorCode::InvalidArgument, "evaluate_total_field: drive vector length differs from L");
  }
  ComplexVector u = s * point_source_field(scene.eval_points, scene.primary_source, ctx, scene.dimension);
  for (Eigen::Index l = 0; l < y.size(); ++l) {
    if (y(l) == Complex(0.0)) continue;
    u += y(l) * point_source_field(scene.eval_points, scene.secondary_sources[l], ctx, scene.dimension);
  }
  return u;
}

double regional_power_reduction(const ComplexVector& u_total, const ComplexVector& u_primary) {
  if (u_total.size() != u_primary.size()) {
    throw Error(ErrorCode::InvalidArgument, "regional_power_reduction: length mismatch");
  }
  const double primary = u_primary.squaredNorm();
  if (!(primary > 0.0)) throw Error(ErrorCode::InvalidArgument, "regional_power_reduction: zero primary field");
  const double total = u_total.squaredNorm();
  if (total == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(total / primary);
}

FieldModel::FieldModel(const Scene& scene, const FrequencyContext& ctx)
    : scene_(scene), ctx_(ctx), mic_transfer_(transfer_matrix(scene, ctx)) {
  const auto n = static_cast<Eigen::Index>(scene.eval_points.size());
  const auto l = static_cast<Eigen::Index>(scene.secondary_sources.size());
  eval_transfer_.resize(n, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    eval_transfer_.col(j) = point_source_field(scene.eval_points, scene.secondary_sources[j], ctx, scene.dimension);
  }
}

ComplexVector FieldModel::primary_at_mics(const Position& source) const {
  return point_source_field(scene_.error_mics, source, ctx_, scene_.dimension);
}

ComplexVector FieldModel::primary_at_eval(const Position& source) const {
  return point_source_field(scene_.eval_points, source, ctx_, scene_.dimension);
}

PowerReduction::PowerReduction(const ComplexMatrix& eval_transfer, const ComplexVector& primary_field)
    : primary_power_(primary_field.squaredNorm()),
      cross_(eval_transfer.adjoint() * primary_field),
      gram_(eval_transfer.adjoint() * eval_transfer) {
  if (!(primary_power_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "PowerReduction: zero primary field");
}

double PowerReduction::reduction_db(const ComplexVector& y, Complex s) const {
  const double total = primary_power_ * std::norm(s) + 2.0 * (std::conj(s) * cross_.dot(y)).real() +
                       gram_.quadratic_form(y);
  if (total <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(total / primary_power_);
}

}  // namespace kianc
