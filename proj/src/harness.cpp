// SPDX-License-Identifier: Apache-2.0

#include "kianc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace kianc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void check_plan(const ExperimentPlan& plan) {
  if (plan.frequencies.empty()) throw Error(ErrorCode::Validation, "plan needs at least one frequency");
  for (double f : plan.frequencies) {
    if (!(f > 0.0) || !std::isfinite(f)) throw Error(ErrorCode::Validation, "frequencies must be positive and finite");
  }
  if (plan.algorithms.empty()) throw Error(ErrorCode::Validation, "plan needs at least one algorithm");
  if (!(plan.budget_fraction > 0.0 && plan.budget_fraction <= 1.0)) {
    throw Error(ErrorCode::Validation, "budget fraction must lie in (0, 1]");
  }
  if (plan.lambda_grid.empty()) throw Error(ErrorCode::Validation, "lambda grid must not be empty");
  for (double l : plan.lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorCode::Validation, "lambda grid values must be finite and >= 0");
  }
  if (plan.fixed_penalty && !(*plan.fixed_penalty >= 0.0)) throw Error(ErrorCode::Validation, "penalty must be >= 0");
  if (plan.record_stride == 0) throw Error(ErrorCode::Validation, "record stride must be positive");
}

void require_single_frequency(const ExperimentPlan& plan, std::string_view scenario) {
  if (plan.frequencies.size() != 1) {
    throw Error(ErrorCode::Validation, std::string(scenario) + " needs exactly one frequency");
  }
}

bool wants(const ExperimentPlan& plan, Algorithm a) {
  return std::find(plan.algorithms.begin(), plan.algorithms.end(), a) != plan.algorithms.end();
}

Calibration calibrate(const FrequencyOperators& ops, const ExperimentPlan& plan) {
  Calibration c;
  c.frequency_hz = ops.ctx.frequency_hz;
  c.j_ext_hat = ops.wiener.j_ext_hat;
  c.budget = plan.budget_fraction * ops.wiener.j_ext_hat;
  c.wiener_p_red_db = ops.wiener_p_red_db;
  c.condition_number = ops.problem.radiation.condition_number;
  c.loaded = ops.problem.radiation.loaded;
  c.penalty = plan.fixed_penalty;
  return c;
}

struct RunRequest {
  Algorithm algorithm;
  double penalty = 0.0;
  std::vector<SourceSegment> schedule;
};

RunResult execute(const FrequencyOperators& ops, const ExperimentSetup& setup, const ExperimentPlan& plan,
                  const Calibration& cal, const RunRequest& req) {
  AdaptationRun run;
  run.algorithm = req.algorithm;
  run.params = setup.params;
  run.params.penalty = req.algorithm == Algorithm::Penal ? req.penalty : 0.0;
  run.params.budget = req.algorithm == Algorithm::Const ? cal.budget : 0.0;
  run.iterations = plan.iterations;
  run.seed = seed_for(plan.master_seed, req.algorithm, cal.frequency_hz);
  run.snr_db = plan.snr_db;
  run.schedule = req.schedule;
  run.reset_on_move = plan.reset_on_move;
  run.record_stride = plan.record_stride;

  AdaptationTrace trace = run_adaptation(ops.field, ops.problem, run);

  RunResult out;
  RunSummary& s = out.summary;
  s.algorithm = req.algorithm;
  s.frequency_hz = cal.frequency_hz;
  s.seed = run.seed;
  s.penalty = run.params.penalty;
  s.budget = run.params.budget;
  s.j_ext_hat = cal.j_ext_hat;
  s.diverged = trace.diverged;
  s.diagnostic = trace.diagnostic;
  if (trace.records.empty()) {
    const Position src = req.schedule.empty() ? setup.scene.primary_source : req.schedule.front().position;
    s.final_j_int = ops.problem.a_int.quadratic_form(ops.field.primary_at_mics(src));
  } else {
    const IterationRecord& last = trace.records.back();
    s.final_p_red_db = last.p_red_db;
    s.final_j_ext = last.j_ext;
    s.final_j_int = last.j_int;
    s.final_w_frobenius = last.w_frobenius;
  }
  out.trace = std::move(trace.records);
  return out;
}

std::vector<RunResult> sweep_penalties(const FrequencyOperators& ops, const ExperimentSetup& setup,
                                       const ExperimentPlan& plan, const Calibration& cal,
                                       const std::vector<SourceSegment>& schedule, unsigned threads) {
  std::vector<RunResult> runs(plan.lambda_grid.size());
  parallel_for(runs.size(), threads, [&](std::size_t i) {
    runs[i] = execute(ops, setup, plan, cal, {Algorithm::Penal, plan.lambda_grid[i], schedule});
  });
  return runs;
}

std::vector<LambdaPoint> curve_of(const std::vector<RunResult>& runs) {
  std::vector<LambdaPoint> curve;
  for (const auto& r : runs) {
    curve.push_back({r.summary.frequency_hz, r.summary.penalty, r.summary.final_j_ext, r.summary.final_p_red_db});
  }
  return curve;
}

// Calibration, lambda choice and one run per selected algorithm at a single
// frequency. `schedule` applies to the final runs only; lambda is always
// chosen on the stationary scene.
struct FrequencyOutcome {
  Calibration calibration;
  std::vector<RunResult> runs;
  std::vector<LambdaPoint> curve;
  std::vector<FrequencyFailure> failures;
};

FrequencyOutcome run_frequency(const FrequencyOperators& ops, const ExperimentSetup& setup,
                               const ExperimentPlan& plan, const std::vector<SourceSegment>& schedule,
                               unsigned threads, bool tolerate_failures) {
  FrequencyOutcome out;
  out.calibration = calibrate(ops, plan);
  Calibration& cal = out.calibration;

  std::optional<RunResult> reusable;
  bool penal_ok = true;
  if (wants(plan, Algorithm::Penal) && !cal.penalty) {
    const std::vector<SourceSegment> stationary{{0, setup.scene.primary_source}};
    std::vector<RunResult> sweep = sweep_penalties(ops, setup, plan, cal, stationary, threads);
    out.curve = curve_of(sweep);
    try {
      cal.penalty = select_lambda(out.curve, cal.budget);
    } catch (const Error& e) {
      if (!tolerate_failures || e.code() != ErrorCode::NoFeasibleLambda) throw;
      out.failures.push_back({cal.frequency_hz, e.code(), e.what()});
      penal_ok = false;
    }
    if (penal_ok && schedule.size() <= 1) {
      for (auto& r : sweep) {
        if (r.summary.penalty == *cal.penalty) reusable = std::move(r);
      }
    }
  }

  std::vector<Algorithm> todo;
  for (Algorithm a : plan.algorithms) {
    if (a == Algorithm::Penal && (!penal_ok || reusable)) continue;
    todo.push_back(a);
  }
  std::vector<std::optional<RunResult>> runs(todo.size());
  std::vector<std::optional<FrequencyFailure>> errors(todo.size());
  parallel_for(todo.size(), threads, [&](std::size_t i) {
    try {
      runs[i] = execute(ops, setup, plan, cal, {todo[i], cal.penalty.value_or(0.0), schedule});
    } catch (const Error& e) {
      if (!tolerate_failures) throw;
      errors[i] = FrequencyFailure{cal.frequency_hz, e.code(), std::string(to_string(todo[i])) + ": " + e.what()};
    }
  });

  std::size_t k = 0;
  for (Algorithm a : plan.algorithms) {
    if (a == Algorithm::Penal && !penal_ok) continue;
    if (a == Algorithm::Penal && reusable) {
      out.runs.push_back(std::move(*reusable));
      continue;
    }
    if (runs[k]) out.runs.push_back(std::move(*runs[k]));
    if (errors[k]) out.failures.push_back(std::move(*errors[k]));
    ++k;
  }
  return out;
}

void absorb(ExperimentResult& result, FrequencyOutcome&& outcome) {
  result.calibrations.push_back(outcome.calibration);
  for (auto& r : outcome.runs) result.runs.push_back(std::move(r));
  for (auto& p : outcome.curve) result.lambda_curve.push_back(p);
  for (auto& f : outcome.failures) result.failures.push_back(std::move(f));
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::Convergence: return "converge";
    case Scenario::LambdaSweep: return "lambda-sweep";
    case Scenario::FreqSweep: return "freq-sweep";
    case Scenario::MovingSource: return "moving-source";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "converge" || name == "convergence") return Scenario::Convergence;
  if (name == "lambda-sweep") return Scenario::LambdaSweep;
  if (name == "freq-sweep") return Scenario::FreqSweep;
  if (name == "moving-source") return Scenario::MovingSource;
  throw Error(ErrorCode::Validation, "unknown scenario '" + std::string(name) + "'");
}

FrequencyOperators build_operators(const ExperimentSetup& setup, double frequency_hz) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw Error(ErrorCode::InvalidArgument, "frequency must be positive and finite");
  }
  const Scene& scene = setup.scene;
  const FrequencyContext ctx = make_frequency_context(scene, frequency_hz);
  FieldModel field(scene, ctx);
  InterpolationOperator interp = interior_energy_matrix(scene, ctx, setup.ridge, setup.quadrature);
  RadiationOperator radiation = maybe_load(radiation_matrix(scene.secondary_sources, ctx, scene.dimension, setup.radiation));
  ControlProblem problem{field.mic_transfer(), interp.a_int, std::move(radiation)};
  const ComplexVector d = field.primary_at_mics(scene.primary_source);
  WienerReference wiener = wiener_reference(problem.g, problem.a_int, d, problem.radiation);
  const double p_red =
      PowerReduction(field.eval_transfer(), field.primary_at_eval(scene.primary_source)).reduction_db(wiener.y_opt);
  return FrequencyOperators{ctx, std::move(field), std::move(problem), std::move(wiener), p_red};
}

std::uint64_t seed_for(std::uint64_t master_seed, Algorithm algorithm, double frequency_hz) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(algorithm));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(frequency_hz));
  return h;
}

double select_lambda(const std::vector<LambdaPoint>& curve, double budget) {
  if (curve.empty()) throw Error(ErrorCode::NoFeasibleLambda, "empty lambda grid");
  if (!(budget > 0.0)) throw Error(ErrorCode::NoFeasibleLambda, "budget is not positive");
  const LambdaPoint* best = nullptr;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& p : curve) {
    if (!(p.final_j_ext > 0.0) || !std::isfinite(p.final_j_ext)) continue;
    const double gap = std::abs(std::log(p.final_j_ext / budget));
    if (gap < best_gap) {
      best_gap = gap;
      best = &p;
    }
  }
  if (best == nullptr || std::abs(best->final_j_ext / budget - 1.0) > 0.15) {
    std::ostringstream msg;
    msg << "no lambda on the grid brings J_ext within 15% of the budget " << budget << " W";
    if (best) msg << " (closest: lambda " << best->penalty << " gives " << best->final_j_ext << " W)";
    throw Error(ErrorCode::NoFeasibleLambda, msg.str());
  }
  return best->penalty;
}

ExperimentResult run_convergence(const ExperimentSetup& setup, const ExperimentPlan& plan) {
  check_plan(plan);
  require_single_frequency(plan, "converge");
  validate_scene(setup.scene);
  ExperimentResult result;
  result.scenario = Scenario::Convergence;
  const FrequencyOperators ops = build_operators(setup, plan.frequencies.front());
  ++result.operator_builds;
  absorb(result, run_frequency(ops, setup, plan, {{0, setup.scene.primary_source}}, resolve_threads(plan.threads), false));
  return result;
}

ExperimentResult run_lambda_sweep(const ExperimentSetup& setup, const ExperimentPlan& plan) {
  check_plan(plan);
  require_single_frequency(plan, "lambda-sweep");
  validate_scene(setup.scene);
  ExperimentResult result;
  result.scenario = Scenario::LambdaSweep;
  const FrequencyOperators ops = build_operators(setup, plan.frequencies.front());
  ++result.operator_builds;
  Calibration cal = calibrate(ops, plan);
  result.runs = sweep_penalties(ops, setup, plan, cal, {{0, setup.scene.primary_source}}, resolve_threads(plan.threads));
  result.lambda_curve = curve_of(result.runs);
  try {
    cal.penalty = select_lambda(result.lambda_curve, cal.budget);
  } catch (const Error& e) {
    result.failures.push_back({cal.frequency_hz, e.code(), e.what()});
  }
  result.calibrations.push_back(cal);
  return result;
}

ExperimentResult run_freq_sweep(const ExperimentSetup& setup, const ExperimentPlan& plan) {
  check_plan(plan);
  if (plan.frequencies.size() < 2) throw Error(ErrorCode::Validation, "freq-sweep needs at least two frequencies");
  validate_scene(setup.scene);
  ExperimentResult result;
  result.scenario = Scenario::FreqSweep;

  const std::size_t nf = plan.frequencies.size();
  std::vector<std::optional<FrequencyOutcome>> outcomes(nf);
  std::vector<std::optional<FrequencyFailure>> failures(nf);
  std::atomic<std::size_t> builds{0};
  parallel_for(nf, resolve_threads(plan.threads), [&](std::size_t i) {
    const double f = plan.frequencies[i];
    try {
      const FrequencyOperators ops = build_operators(setup, f);
      ++builds;
      outcomes[i] = run_frequency(ops, setup, plan, {{0, setup.scene.primary_source}}, 1, true);
    } catch (const Error& e) {
      failures[i] = FrequencyFailure{f, e.code(), e.what()};
    }
  });
  for (std::size_t i = 0; i < nf; ++i) {
    if (outcomes[i]) absorb(result, std::move(*outcomes[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  result.operator_builds = builds.load();
  return result;
}

ExperimentResult run_moving_source(const ExperimentSetup& setup, const ExperimentPlan& plan) {
  check_plan(plan);
  require_single_frequency(plan, "moving-source");
  validate_scene(setup.scene);
  if (plan.move_iteration == 0) throw Error(ErrorCode::Validation, "move iteration must be positive");
  ExperimentResult result;
  result.scenario = Scenario::MovingSource;
  const FrequencyOperators ops = build_operators(setup, plan.frequencies.front());
  ++result.operator_builds;
  const std::vector<SourceSegment> schedule{{0, setup.scene.primary_source},
                                            {plan.move_iteration, plan.moved_source}};
  absorb(result, run_frequency(ops, setup, plan, schedule, resolve_threads(plan.threads), false));
  return result;
}

ExperimentResult run_experiment(const ExperimentSetup& setup, const ExperimentPlan& plan) {
  switch (plan.scenario) {
    case Scenario::Convergence: return run_convergence(setup, plan);
    case Scenario::LambdaSweep: return run_lambda_sweep(setup, plan);
    case Scenario::FreqSweep: return run_freq_sweep(setup, plan);
    case Scenario::MovingSource: return run_moving_source(setup, plan);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scenario");
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace kianc
