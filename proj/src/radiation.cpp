// SPDX-License-Identifier: Apache-2.0

#include "kianc/radiation.hpp"

#include <cmath>

#include "kianc/error.hpp"
#include "kianc/kernel_interp.hpp"

namespace kianc {

RadiationOperator radiation_matrix(const std::vector<Position>& sources, const FrequencyContext& ctx,
                                   int dimension, const RadiationOptions& options) {
  if (sources.empty()) throw Error(ErrorCode::InvalidArgument, "radiation_matrix: no sources");
  if (!(ctx.wavenumber > 0.0)) throw Error(ErrorCode::InvalidArgument, "radiation_matrix: wavenumber must be positive");
  if (!(options.eta > 0.0) || !(options.cond_threshold >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "radiation_matrix: eta must be > 0 and threshold >= 1");
  }
  const double scale = 1.0 / (8.0 * ctx.air_density * ctx.sound_speed * ctx.wavenumber);
  const auto l = static_cast<Eigen::Index>(sources.size());
  ComplexMatrix a(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    a(i, i) = scale;
    for (Eigen::Index j = i + 1; j < l; ++j) {
      const double v = scale * kernel(sources[i], sources[j], ctx.wavenumber, dimension);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  RadiationOperator op;
  op.a_ext = math::HermitianMatrix(a);
  op.a_ext_algorithm = op.a_ext;
  op.eta = options.eta;
  op.cond_threshold = options.cond_threshold;
  return op;
}

RadiationOperator maybe_load(RadiationOperator op) {
  op.condition_number = math::condition_number_l2(op.a_ext);
  op.loaded = op.condition_number > op.cond_threshold;
  op.a_ext_algorithm = op.loaded ? op.a_ext.shifted(op.eta) : op.a_ext;
  return op;
}

double exterior_power(const RadiationOperator& op, const ComplexVector& y) {
  const double q = op.a_ext.quadratic_form(y);
  if (q < 0.0 && q > -1e-12 * op.a_ext.matrix().norm() * y.squaredNorm()) return 0.0;
  return q;
}

WienerReference wiener_reference(const ComplexMatrix& g, const math::HermitianMatrix& a_int,
                                 const ComplexVector& d_clean, const RadiationOperator& radiation) {
  if (g.rows() != a_int.dim() || d_clean.size() != g.rows()) {
    throw Error(ErrorCode::InvalidArgument, "wiener_reference: dimension mismatch");
  }
  const math::HermitianMatrix normal(g.adjoint() * a_int.matrix() * g);
  const ComplexVector rhs = g.adjoint() * (a_int.matrix() * d_clean);

  WienerReference ref;
  try {
    ref.y_opt = -math::hermitian_solve(normal, rhs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    const double loading = 1e-12 * normal.matrix().trace().real() / static_cast<double>(normal.dim());
    try {
      ref.y_opt = -math::hermitian_solve(normal.shifted(loading), rhs);
      ref.regularized = true;
    } catch (const Error&) {
      throw Error(ErrorCode::Singular, "wiener_reference: G^H A_int G is singular even after loading");
    }
  }
  ref.j_ext_hat = exterior_power(radiation, ref.y_opt);
  return ref;
}

}  // namespace kianc
