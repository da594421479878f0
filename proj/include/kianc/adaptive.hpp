// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kianc/acoustics.hpp"
#include "kianc/math.hpp"
#include "kianc/radiation.hpp"

namespace kianc {

enum class Algorithm { Nlms, Penal, Const };

std::string_view to_string(Algorithm algorithm);
/// Accepts "nlms", "penal", "const". Throws Error(Validation) otherwise.
Algorithm parse_algorithm(std::string_view name);

struct AlgorithmParams {
  double mu0 = 0.9;
  double beta = 1e-8;      // regularizer of every step-size denominator
  double penalty = 0.0;    // lambda of the penalty method, kg/s
  double budget = 0.0;     // C of the constrained method, W
  double alpha = 0.99;     // forgetting factor of the R_xx estimate
  int warmup = 10;         // sample-mean updates before the recursion (R >= 2)

  bool operator==(const AlgorithmParams&) const = default;
};

/// Throws Error(Validation) if mu0, beta, alpha or penalty are out of range.
void validate_params(const AlgorithmParams& params);

/// Operators shared by every controller at one frequency.
struct ControlProblem {
  ComplexMatrix g;                // M x L
  math::HermitianMatrix a_int;    // M x M
  RadiationOperator radiation;    // L x L
};

/// Iteration-independent step-size norms and the inverse of the loaded A_ext.
struct StepCache {
  double interior_norm = 0.0;     // ||G^H A_int G||_2
  double penalized_norm = 0.0;    // ||G^H A_int G + lambda A_ext||_2
  double constrained_norm = 0.0;  // ||A_ext^{-1} G^H A_int G||_2
  ComplexMatrix a_ext_inverse;    // inverse of the algorithm A_ext (const only)
};

StepCache prepare_steps(const ControlProblem& problem, const AlgorithmParams& params, Algorithm algorithm);

struct ControllerState {
  ComplexMatrix w;              // L x R
  std::size_t n = 0;
  ComplexMatrix lambda_xx;      // R x R estimate of R_xx^{-1}
  ComplexMatrix r_sum;          // running sum of x x^H during warm-up
  std::size_t autocorr_updates = 0;
  ComplexVector last_y;

  static ControllerState zero(Eigen::Index sources, Eigen::Index references);
};

/// dJ_int/dW* = G^H A_int e x^H.
ComplexMatrix interior_gradient(const ControlProblem& problem, const ComplexVector& e, const ComplexVector& x);

/// dJ_penal/dW* = (G^H A_int e + lambda A_ext y) x^H, y = W x.
ComplexMatrix penalized_gradient(const ControlProblem& problem, const ComplexMatrix& w, const ComplexVector& e,
                                 const ComplexVector& x, double penalty);

ControllerState nlms_step(ControllerState state, const ControlProblem& problem, const ComplexVector& e,
                          const ComplexVector& x, const AlgorithmParams& params, const StepCache& cache);

ControllerState penal_step(ControllerState state, const ControlProblem& problem, const ComplexVector& e,
                           const ComplexVector& x, const AlgorithmParams& params, const StepCache& cache);

/// Preconditioned gradient step followed by radial scaling onto
/// {W : (W x)^H A_ext (W x) <= C}. Uses state.lambda_xx, so call
/// update_autocorr_inverse with the same x first.
ControllerState const_step(ControllerState state, const ControlProblem& problem, const ComplexVector& e,
                           const ComplexVector& x, const AlgorithmParams& params, const StepCache& cache);

/// One Sherman-Morrison update of Lambda = R^{-1} for
/// R <- alpha R + (1 - alpha) x x^H.
ComplexMatrix sherman_morrison_update(const ComplexMatrix& lambda, const ComplexVector& x, double alpha);

/// R = 1: Lambda = 1 / |x|^2. R >= 2: sample-mean warm-up for the first
/// `warmup` updates, then the Sherman-Morrison recursion.
ControllerState update_autocorr_inverse(ControllerState state, const ComplexVector& x, double alpha, int warmup = 10);

struct IterationRecord {
  std::size_t n = 0;
  double p_red_db = 0.0;
  double j_ext = 0.0;
  double j_int = 0.0;
  double w_frobenius = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

/// The primary source is at `position` from iteration `start` on.
struct SourceSegment {
  std::size_t start = 0;
  Position position;
};

struct AdaptationRun {
  Algorithm algorithm = Algorithm::Nlms;
  AlgorithmParams params;
  std::size_t iterations = 0;
  std::uint64_t seed = 1;
  /// Per-channel SNR in dB; +infinity disables the measurement noise.
  double snr_db = 40.0;
  std::vector<SourceSegment> schedule;
  bool reset_on_move = false;
  /// Keep every k-th record (the final one is always kept).
  std::size_t record_stride = 1;
};

struct StepObservation {
  std::size_t n;
  const ComplexVector& x;
  const ControllerState& state;  // after the update
};
using StepObserver = std::function<void(const StepObservation&)>;

struct AdaptationTrace {
  std::vector<IterationRecord> records;
  ComplexMatrix final_w;
  bool diverged = false;
  std::string diagnostic;
};

/// Simulates the closed loop. Per iteration: s = 1; d = s * primary at the
/// mics; x = s + reference noise; y = W x; e = d + G y + mic noise; one
/// controller step; then a record of P_red, J_ext (unloaded A_ext) and J_int
/// for the drive W_{n+1} x, synthesized without noise.
AdaptationTrace run_adaptation(const FieldModel& field, const ControlProblem& problem, const AdaptationRun& run,
                               const StepObserver& observer = {});

}  // namespace kianc
