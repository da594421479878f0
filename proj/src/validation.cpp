// SPDX-License-Identifier: Apache-2.0

#include "kianc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "kianc/error.hpp"
#include "kianc/output.hpp"

namespace kianc {

namespace {

using nlohmann::ordered_json;

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> n;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * Complex(n(rng), n(rng));
  return m;
}

// Green's function value and radial derivative at distance d.
std::pair<Complex, Complex> green_and_slope(double d, double k, int dimension) {
  const Complex i(0.0, 1.0);
  if (dimension == 2) {
    const double x = k * d;
    const Complex h0(std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x));
    const Complex h1(std::cyl_bessel_j(1.0, x), std::cyl_neumann(1.0, x));
    return {0.25 * i * h0, -0.25 * i * k * h1};
  }
  const Complex g = std::exp(i * (k * d)) / (4.0 * std::numbers::pi * d);
  return {g, g * (i * k - 1.0 / d)};
}

double max_rel_gradient_error(const ControlProblem& problem, const ComplexVector& d, const ComplexMatrix& w,
                              const ComplexVector& x, double penalty) {
  auto cost = [&](const ComplexMatrix& wm) {
    const ComplexVector y = wm * x;
    const ComplexVector e = d + problem.g * y;
    return problem.a_int.quadratic_form(e) + penalty * problem.radiation.a_ext.quadratic_form(y);
  };
  const ComplexVector e = d + problem.g * (w * x);
  const ComplexMatrix grad = penalty == 0.0 ? interior_gradient(problem, e, x)
                                            : penalized_gradient(problem, w, e, x, penalty);
  const double h = 1e-4 * std::max(w.norm() / std::sqrt(static_cast<double>(w.size())), 1e-12);
  ComplexMatrix fd(w.rows(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      ComplexMatrix p = w, m = w;
      p(i, j) += h;
      m(i, j) -= h;
      const double dre = (cost(p) - cost(m)) / (2.0 * h);
      p = w;
      m = w;
      p(i, j) += Complex(0.0, h);
      m(i, j) -= Complex(0.0, h);
      const double dim = (cost(p) - cost(m)) / (2.0 * h);
      fd(i, j) = 0.5 * Complex(dre, dim);
    }
  }
  return (fd - grad).norm() / grad.norm();
}

CheckResult check(std::string name, double measured, double tolerance, bool at_most, std::string detail = {}) {
  const bool ok = std::isfinite(measured) && (at_most ? measured <= tolerance : measured >= tolerance);
  return {std::move(name), ok, measured, tolerance, std::move(detail)};
}

ordered_json matrix_json(const ComplexMatrix& m) {
  ordered_json re = ordered_json::array(), im = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array(), c = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return ordered_json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

}  // namespace

bool ValidationReport::all_passed() const { return failed() == 0; }

std::size_t ValidationReport::failed() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

std::string ValidationReport::text() const {
  std::ostringstream o;
  for (const auto& c : checks) {
    o << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_double(c.measured)
      << " tolerance=" << format_double(c.tolerance);
    if (!c.detail.empty()) o << " (" << c.detail << ")";
    o << "\n";
  }
  return o.str();
}

std::string ValidationReport::json() const {
  ordered_json j;
  j["freq_hz"] = frequency_hz;
  j["passed"] = all_passed();
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back(ordered_json{{"name", c.name},
                               {"passed", c.passed},
                               {"measured", std::isfinite(c.measured) ? ordered_json(c.measured) : ordered_json(nullptr)},
                               {"tolerance", c.tolerance},
                               {"detail", c.detail}});
  }
  j["checks"] = std::move(arr);
  return j.dump(2) + "\n";
}

double surface_radiated_power(const Scene& scene, const FrequencyContext& ctx, const ComplexVector& y, double radius,
                              int angular_nodes) {
  if (y.size() != static_cast<Eigen::Index>(scene.secondary_sources.size())) {
    throw Error(ErrorCode::InvalidArgument, "surface_radiated_power: drive length differs from L");
  }
  if (angular_nodes < 8 || !(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "surface_radiated_power: bad rule");
  const double k = ctx.wavenumber;
  const Position& c = scene.target_center;

  auto flux = [&](const Position& r, const Position& normal) {
    Complex p = 0.0, dp = 0.0;
    for (std::size_t l = 0; l < scene.secondary_sources.size(); ++l) {
      const Position& s = scene.secondary_sources[l];
      const double d = distance(r, s);
      const auto [g, slope] = green_and_slope(d, k, scene.dimension);
      const double cosine = ((r.x - s.x) * normal.x + (r.y - s.y) * normal.y + (r.z - s.z) * normal.z) / d;
      p += y(static_cast<Eigen::Index>(l)) * g;
      dp += y(static_cast<Eigen::Index>(l)) * slope * cosine;
    }
    return (std::conj(p) * dp).imag();
  };

  double integral = 0.0;
  if (scene.dimension == 2) {
    const double step = 2.0 * std::numbers::pi / angular_nodes;
    for (int q = 0; q < angular_nodes; ++q) {
      const double t = q * step;
      const Position n{std::cos(t), std::sin(t), 0.0};
      integral += flux({c.x + radius * n.x, c.y + radius * n.y, 0.0}, n) * radius * step;
    }
  } else {
    const int n_theta = std::max(16, angular_nodes / 16), n_phi = std::max(16, angular_nodes / 8);
    std::vector<double> gx, gw;
    gauss_legendre(n_theta, gx, gw);
    const double step = 2.0 * std::numbers::pi / n_phi;
    for (int a = 0; a < n_theta; ++a) {
      const double st = std::sqrt(std::max(0.0, 1.0 - gx[a] * gx[a]));
      for (int b = 0; b < n_phi; ++b) {
        const double phi = b * step;
        const Position n{st * std::cos(phi), st * std::sin(phi), gx[a]};
        integral += flux({c.x + radius * n.x, c.y + radius * n.y, c.z + radius * n.z}, n) * radius * radius * gw[a] * step;
      }
    }
  }
  return integral / (2.0 * ctx.air_density * ctx.angular_frequency);
}

ValidationReport run_validation(const ExperimentSetup& setup, double frequency_hz, std::uint64_t seed) {
  validate_scene(setup.scene);
  const FrequencyOperators ops = build_operators(setup, frequency_hz);
  const ControlProblem& problem = ops.problem;
  const Scene& scene = setup.scene;
  std::mt19937_64 rng(seed);
  ValidationReport report;
  report.frequency_hz = frequency_hz;

  for (const auto& [name, m] : {std::pair{"a_int is positive semidefinite", &problem.a_int},
                                std::pair{"a_ext is positive semidefinite", &problem.radiation.a_ext}}) {
    const double min_eig = math::hermitian_eigenvalues(*m).minCoeff();
    const double asym = (m->matrix() - m->matrix().adjoint()).norm();
    report.checks.push_back(check(name, min_eig, -1e-10, false, "asymmetry " + format_double(asym)));
  }

  {
    const double radius = std::max(5.0, 5.0 * scene.target_radius);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const ComplexVector y = random_matrix(rng, problem.g.cols(), 1, 1.0);
      const double q = exterior_power(problem.radiation, y);
      const double flux = surface_radiated_power(scene, ops.ctx, y, radius);
      worst = std::max(worst, std::abs(q - flux) / std::abs(flux));
    }
    report.checks.push_back(check("exterior power matches surface flux", worst, 1e-2, true,
                                  "radius " + format_double(radius) + " m, 10 random drives"));
  }

  const ComplexVector d = ops.field.primary_at_mics(scene.primary_source);
  {
    const double scale = ops.wiener.y_opt.norm() / std::sqrt(static_cast<double>(problem.g.cols()));
    double worst_int = 0.0, worst_pen = 0.0;
    for (int t = 0; t < 5; ++t) {
      const ComplexMatrix w = random_matrix(rng, problem.g.cols(), scene.reference_count, scale);
      const ComplexVector x = random_matrix(rng, scene.reference_count, 1, 1.0);
      worst_int = std::max(worst_int, max_rel_gradient_error(problem, d, w, x, 0.0));
      worst_pen = std::max(worst_pen, max_rel_gradient_error(problem, d, w, x, 0.1));
    }
    report.checks.push_back(check("interior gradient matches finite differences", worst_int, 1e-6, true));
    report.checks.push_back(check("penalized gradient matches finite differences", worst_pen, 1e-6, true, "lambda 0.1"));
  }

  {
    const double alpha = 0.99;
    ComplexMatrix r = ComplexMatrix::Identity(3, 3);
    ComplexMatrix lambda = ComplexMatrix::Identity(3, 3);
    for (int n = 0; n < 200; ++n) {
      const ComplexVector x = random_matrix(rng, 3, 1, 1.0);
      r = alpha * r + (1.0 - alpha) * x * x.adjoint();
      lambda = sherman_morrison_update(lambda, x, alpha);
    }
    const double err = (lambda * r - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff();
    report.checks.push_back(check("recursive inverse matches direct inverse", err, 1e-8, true, "R = 3, 200 updates"));
  }

  {
    double worst = 0.0;
    for (double x = 0.25; x <= 60.0; x += 0.25) {
      worst = std::max(worst, std::abs(math::bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
      worst = std::max(worst, std::abs(math::bessel_y0(x) - std::cyl_neumann(0.0, x)));
    }
    report.checks.push_back(check("Bessel J0/Y0 match the standard library", worst, 1e-10, true, "x in [0.25, 60]"));
  }

  {
    const QuadratureRule rule = region_quadrature(scene, setup.quadrature);
    const InterpolationOperator interp = interior_energy_matrix(scene, ops.ctx, setup.ridge, rule);
    const ComplexVector e = d + problem.g * (0.5 * ops.wiener.y_opt);
    double direct = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      direct += rule.weights[q] * std::norm(estimate_field(interp, scene.error_mics, e, rule.nodes[q]));
    }
    const double form = problem.a_int.quadratic_form(e);
    report.checks.push_back(check("interior energy form matches direct quadrature", std::abs(form - direct) / direct,
                                  1e-9, true));
  }

  {
    const ComplexVector residual =
        problem.g.adjoint() * (problem.a_int.matrix() * (d + problem.g * ops.wiener.y_opt));
    const ComplexVector base = problem.g.adjoint() * (problem.a_int.matrix() * d);
    report.checks.push_back(check("Wiener drive is stationary", residual.norm() / base.norm(), 1e-8, true));
  }
  return report;
}

std::string operators_json(const FrequencyOperators& ops) {
  ordered_json j;
  j["freq_hz"] = ops.ctx.frequency_hz;
  j["wavenumber"] = ops.ctx.wavenumber;
  j["cond_a_ext"] = ops.problem.radiation.condition_number;
  j["loaded"] = ops.problem.radiation.loaded;
  j["eta"] = ops.problem.radiation.eta;
  j["j_ext_hat_w"] = ops.wiener.j_ext_hat;
  j["wiener_p_red_db"] = ops.wiener_p_red_db;
  j["g"] = matrix_json(ops.problem.g);
  j["a_int"] = matrix_json(ops.problem.a_int.matrix());
  j["a_ext"] = matrix_json(ops.problem.radiation.a_ext.matrix());
  j["a_ext_algorithm"] = matrix_json(ops.problem.radiation.a_ext_algorithm.matrix());
  j["y_opt"] = matrix_json(ops.wiener.y_opt);
  return j.dump(1) + "\n";
}

}  // namespace kianc
