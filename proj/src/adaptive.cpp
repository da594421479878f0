// SPDX-License-Identifier: Apache-2.0

#include "kianc/adaptive.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "kianc/error.hpp"

namespace kianc {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Nlms: return "nlms";
    case Algorithm::Penal: return "penal";
    case Algorithm::Const: return "const";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "nlms") return Algorithm::Nlms;
  if (name == "penal") return Algorithm::Penal;
  if (name == "const") return Algorithm::Const;
  throw Error(ErrorCode::Validation, "unknown algorithm '" + std::string(name) + "' (expected nlms, penal or const)");
}

void validate_params(const AlgorithmParams& p) {
  if (!(p.mu0 > 0.0 && p.mu0 < 2.0)) throw Error(ErrorCode::Validation, "mu0 must lie in (0, 2)");
  if (!(p.beta > 0.0)) throw Error(ErrorCode::Validation, "beta must be positive");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw Error(ErrorCode::Validation, "alpha must lie in (0, 1)");
  if (!(p.penalty >= 0.0) || !std::isfinite(p.penalty)) throw Error(ErrorCode::Validation, "penalty must be finite and >= 0");
  if (p.warmup < 1) throw Error(ErrorCode::Validation, "warmup must be at least 1");
}

StepCache prepare_steps(const ControlProblem& problem, const AlgorithmParams& params, Algorithm algorithm) {
  StepCache cache;
  const ComplexMatrix normal = problem.g.adjoint() * problem.a_int.matrix() * problem.g;
  cache.interior_norm = math::spectral_norm(normal);
  if (algorithm == Algorithm::Penal) {
    cache.penalized_norm = math::spectral_norm(normal + params.penalty * problem.radiation.a_ext.matrix());
  }
  if (algorithm == Algorithm::Const) {
    if (!(params.budget > 0.0) || !std::isfinite(params.budget)) {
      throw Error(ErrorCode::Validation, "the constrained method needs a positive finite budget C");
    }
    const auto l = problem.radiation.a_ext_algorithm.dim();
    cache.a_ext_inverse = math::hermitian_solve(problem.radiation.a_ext_algorithm, ComplexMatrix::Identity(l, l));
    cache.constrained_norm = math::spectral_norm(cache.a_ext_inverse * normal);
  }
  return cache;
}

ControllerState ControllerState::zero(Eigen::Index sources, Eigen::Index references) {
  ControllerState s;
  s.w = ComplexMatrix::Zero(sources, references);
  s.lambda_xx = ComplexMatrix::Identity(references, references);
  s.r_sum = ComplexMatrix::Zero(references, references);
  s.last_y = ComplexVector::Zero(sources);
  return s;
}

ComplexMatrix interior_gradient(const ControlProblem& problem, const ComplexVector& e, const ComplexVector& x) {
  const ComplexVector g = problem.g.adjoint() * (problem.a_int.matrix() * e);
  return g * x.adjoint();
}

ComplexMatrix penalized_gradient(const ControlProblem& problem, const ComplexMatrix& w, const ComplexVector& e,
                                 const ComplexVector& x, double penalty) {
  const ComplexVector y = w * x;
  const ComplexVector g = problem.g.adjoint() * (problem.a_int.matrix() * e) +
                          penalty * (problem.radiation.a_ext.matrix() * y);
  return g * x.adjoint();
}

ControllerState nlms_step(ControllerState state, const ControlProblem& problem, const ComplexVector& e,
                          const ComplexVector& x, const AlgorithmParams& params, const StepCache& cache) {
  const double mu = params.mu0 / (cache.interior_norm * x.squaredNorm() + params.beta);
  state.w -= mu * interior_gradient(problem, e, x);
  return state;
}

ControllerState penal_step(ControllerState state, const ControlProblem& problem, const ComplexVector& e,
                           const ComplexVector& x, const AlgorithmParams& params, const StepCache& cache) {
  const double mu = params.mu0 / (cache.penalized_norm * x.squaredNorm() + params.beta);
  state.w -= mu * penalized_gradient(problem, state.w, e, x, params.penalty);
  return state;
}

ControllerState const_step(ControllerState state, const ControlProblem& problem, const ComplexVector& e,
                           const ComplexVector& x, const AlgorithmParams& params, const StepCache& cache) {
  const double mu = params.mu0 / (cache.constrained_norm + params.beta);
  const ComplexMatrix z = state.w - mu * (cache.a_ext_inverse * interior_gradient(problem, e, x)) * state.lambda_xx;
  const ComplexVector y_tilde = z * x;
  const double power = problem.radiation.a_ext_algorithm.quadratic_form(y_tilde);
  if (!std::isfinite(power)) {
    throw Error(ErrorCode::Numerical, "const_step: non-finite radiated power in the projection");
  }
  const double scale = power > params.budget ? std::sqrt(params.budget / power) : 1.0;
  state.w = scale * z;
  return state;
}

ComplexMatrix sherman_morrison_update(const ComplexMatrix& lambda, const ComplexVector& x, double alpha) {
  const ComplexVector v = lambda * x;
  const double denom = x.dot(v).real() + alpha / (1.0 - alpha);
  ComplexMatrix out = (lambda - (v * v.adjoint()) / denom) / alpha;
  return 0.5 * (out + out.adjoint());
}

ControllerState update_autocorr_inverse(ControllerState state, const ComplexVector& x, double alpha, int warmup) {
  const Eigen::Index r = x.size();
  const double energy = x.squaredNorm();
  if (r == 1) {
    if (energy > 0.0) state.lambda_xx = ComplexMatrix::Constant(1, 1, 1.0 / energy);
    ++state.autocorr_updates;
    return state;
  }
  if (state.autocorr_updates < static_cast<std::size_t>(warmup)) {
    state.r_sum += x * x.adjoint();
    ++state.autocorr_updates;
    const ComplexMatrix mean = state.r_sum / static_cast<double>(state.autocorr_updates);
    const double loading = 1e-3 * mean.trace().real() / static_cast<double>(r);
    if (loading > 0.0) {
      state.lambda_xx = math::hermitian_solve(math::HermitianMatrix(mean).shifted(loading),
                                              ComplexMatrix::Identity(r, r));
    }
    return state;
  }
  state.lambda_xx = sherman_morrison_update(state.lambda_xx, x, alpha);
  ++state.autocorr_updates;
  return state;
}

namespace {

class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}

  // Circularly-symmetric complex Gaussian with variance sigma^2.
  Complex sample(double sigma) {
    const double s = sigma * std::sqrt(0.5);
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    return {s * re, s * im};
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

struct Segment {
  std::size_t start;
  ComplexVector d;
  Eigen::VectorXd mic_sigma;
  PowerReduction reduction;
};

}  // namespace

AdaptationTrace run_adaptation(const FieldModel& field, const ControlProblem& problem, const AdaptationRun& run,
                               const StepObserver& observer) {
  validate_params(run.params);
  if (run.record_stride == 0) throw Error(ErrorCode::InvalidArgument, "record_stride must be positive");
  if (!(run.snr_db >= 0.0)) throw Error(ErrorCode::Validation, "SNR must be >= 0 dB or infinite");

  const Scene& scene = field.scene();
  std::vector<SourceSegment> schedule = run.schedule;
  if (schedule.empty()) schedule.push_back({0, scene.primary_source});
  if (schedule.front().start != 0) throw Error(ErrorCode::InvalidArgument, "source schedule must start at iteration 0");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].start <= schedule[i - 1].start) {
      throw Error(ErrorCode::InvalidArgument, "source schedule must be strictly increasing");
    }
  }

  const bool noisy = std::isfinite(run.snr_db);
  const double noise_ratio = noisy ? std::pow(10.0, -run.snr_db / 10.0) : 0.0;
  const Complex s = 1.0;

  std::vector<Segment> segments;
  for (const auto& seg : schedule) {
    ComplexVector d = field.primary_at_mics(seg.position);
    Eigen::VectorXd sigma = (d.cwiseAbs2() * noise_ratio).cwiseSqrt();
    segments.push_back({seg.start, std::move(d), std::move(sigma),
                        PowerReduction(field.eval_transfer(), field.primary_at_eval(seg.position))});
  }

  const Eigen::Index l = problem.g.cols();
  const Eigen::Index m = problem.g.rows();
  const Eigen::Index r = scene.reference_count;
  const double ref_sigma = std::sqrt(std::norm(s) * noise_ratio);

  const StepCache cache = prepare_steps(problem, run.params, run.algorithm);
  ControllerState state = ControllerState::zero(l, r);
  NoiseSource noise(run.seed);

  AdaptationTrace trace;
  trace.records.reserve(run.iterations / run.record_stride + 1);
  std::size_t current = 0;
  ComplexVector x(r), e(m);

  for (std::size_t n = 0; n < run.iterations; ++n) {
    if (current + 1 < segments.size() && n == segments[current + 1].start) {
      ++current;
      if (run.reset_on_move) {
        state.lambda_xx = ComplexMatrix::Identity(r, r);
        state.r_sum.setZero();
        state.autocorr_updates = 0;
      }
    }
    const Segment& seg = segments[current];

    for (Eigen::Index i = 0; i < r; ++i) x(i) = s + (noisy ? noise.sample(ref_sigma) : Complex(0.0));
    if (run.algorithm == Algorithm::Const) {
      state = update_autocorr_inverse(std::move(state), x, run.params.alpha, run.params.warmup);
    }
    state.last_y = state.w * x;
    e = s * seg.d + problem.g * state.last_y;
    if (noisy) {
      for (Eigen::Index i = 0; i < m; ++i) e(i) += noise.sample(seg.mic_sigma(i));
    }

    switch (run.algorithm) {
      case Algorithm::Nlms: state = nlms_step(std::move(state), problem, e, x, run.params, cache); break;
      case Algorithm::Penal: state = penal_step(std::move(state), problem, e, x, run.params, cache); break;
      case Algorithm::Const: state = const_step(std::move(state), problem, e, x, run.params, cache); break;
    }
    state.n = n + 1;

    const bool finite = state.w.allFinite();
    if (!finite || n % run.record_stride == 0 || n + 1 == run.iterations) {
      const ComplexVector y = state.w * x;
      IterationRecord rec;
      rec.n = n;
      rec.w_frobenius = state.w.norm();
      if (finite) {
        rec.p_red_db = seg.reduction.reduction_db(y, s);
        rec.j_ext = exterior_power(problem.radiation, y);
        rec.j_int = problem.a_int.quadratic_form(s * seg.d + problem.g * y);
      } else {
        rec.p_red_db = rec.j_ext = rec.j_int = std::numeric_limits<double>::quiet_NaN();
      }
      trace.records.push_back(rec);
    }
    if (!finite) {
      std::ostringstream msg;
      msg << to_string(run.algorithm) << ": control filter became non-finite at iteration " << n;
      trace.diverged = true;
      trace.diagnostic = msg.str();
      break;
    }
    if (observer) observer(StepObservation{n, x, state});
  }
  trace.final_w = state.w;
  return trace;
}

}  // namespace kianc
