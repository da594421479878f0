// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kianc/acoustics.hpp"
#include "kianc/adaptive.hpp"
#include "kianc/error.hpp"
#include "kianc/kernel_interp.hpp"
#include "kianc/radiation.hpp"

namespace kianc {

enum class Scenario { Convergence, LambdaSweep, FreqSweep, MovingSource };

std::string_view to_string(Scenario scenario);
/// Accepts the subcommand spellings: converge, lambda-sweep, freq-sweep, moving-source.
Scenario parse_scenario(std::string_view name);

struct ExperimentPlan {
  Scenario scenario = Scenario::Convergence;
  std::vector<double> frequencies{600.0};
  std::size_t iterations = 50000;
  std::vector<Algorithm> algorithms{Algorithm::Nlms, Algorithm::Penal, Algorithm::Const};
  std::vector<double> lambda_grid{0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  /// Skips the lambda search when set.
  std::optional<double> fixed_penalty;
  double budget_fraction = 0.5;
  std::uint64_t master_seed = 0x4b69414e43ULL;
  double snr_db = 40.0;
  std::size_t move_iteration = 25000;
  Position moved_source{-2.0, 0.2, 0.0};
  bool reset_on_move = false;
  std::size_t record_stride = 1;
  /// Worker threads for independent runs; 0 picks the hardware count.
  unsigned threads = 0;
};

/// Everything fixed across the frequencies of one experiment.
struct ExperimentSetup {
  Scene scene;
  AlgorithmParams params;  // penalty and budget are filled per frequency
  double ridge = 1e-3;
  QuadratureSpec quadrature;
  RadiationOptions radiation;
};

/// Per-frequency operators, built once and shared by every run.
struct FrequencyOperators {
  FrequencyContext ctx;
  FieldModel field;
  ControlProblem problem;
  WienerReference wiener;
  double wiener_p_red_db = 0.0;
};

FrequencyOperators build_operators(const ExperimentSetup& setup, double frequency_hz);

/// Stable per-(algorithm, frequency) seed derived from the master seed.
std::uint64_t seed_for(std::uint64_t master_seed, Algorithm algorithm, double frequency_hz);

struct Calibration {
  double frequency_hz = 0.0;
  double j_ext_hat = 0.0;
  double budget = 0.0;
  double wiener_p_red_db = 0.0;
  double condition_number = 0.0;
  bool loaded = false;
  std::optional<double> penalty;
};

struct RunSummary {
  Algorithm algorithm = Algorithm::Nlms;
  double frequency_hz = 0.0;
  std::uint64_t seed = 0;
  double penalty = 0.0;
  double budget = 0.0;
  double j_ext_hat = 0.0;
  double final_p_red_db = 0.0;
  double final_j_ext = 0.0;
  double final_j_int = 0.0;
  double final_w_frobenius = 0.0;
  bool diverged = false;
  std::string diagnostic;
};

struct RunResult {
  RunSummary summary;
  std::vector<IterationRecord> trace;
};

struct LambdaPoint {
  double frequency_hz = 0.0;
  double penalty = 0.0;
  double final_j_ext = 0.0;
  double final_p_red_db = 0.0;
};

struct FrequencyFailure {
  double frequency_hz = 0.0;
  ErrorCode code = ErrorCode::Numerical;
  std::string message;
};

struct ExperimentResult {
  Scenario scenario = Scenario::Convergence;
  std::vector<Calibration> calibrations;
  std::vector<RunResult> runs;
  std::vector<LambdaPoint> lambda_curve;
  std::vector<FrequencyFailure> failures;
  std::size_t operator_builds = 0;
};

/// Grid point whose converged J_ext is closest to the budget in log ratio.
/// Throws Error(NoFeasibleLambda) if even that point is more than 15% away.
double select_lambda(const std::vector<LambdaPoint>& curve, double budget);

ExperimentResult run_convergence(const ExperimentSetup& setup, const ExperimentPlan& plan);
ExperimentResult run_lambda_sweep(const ExperimentSetup& setup, const ExperimentPlan& plan);
ExperimentResult run_freq_sweep(const ExperimentSetup& setup, const ExperimentPlan& plan);
ExperimentResult run_moving_source(const ExperimentSetup& setup, const ExperimentPlan& plan);
/// Dispatches on plan.scenario.
ExperimentResult run_experiment(const ExperimentSetup& setup, const ExperimentPlan& plan);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace kianc
