// SPDX-License-Identifier: Apache-2.0

#include "kianc/kianc.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "kianc/config.hpp"
#include "kianc/error.hpp"
#include "kianc/harness.hpp"
#include "kianc/output.hpp"
#include "kianc/plot.hpp"
#include "kianc/validation.hpp"

struct kianc_config {
  kianc::RunConfig config;
};

struct kianc_result {
  kianc::ExperimentResult result;
  std::uint64_t master_seed = 0;
};

namespace {

thread_local std::string last_error;

kianc_status status_of(kianc::ErrorCode code) {
  using kianc::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return KIANC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Validation: return KIANC_ERR_VALIDATION;
    case ErrorCode::Domain: return KIANC_ERR_DOMAIN;
    case ErrorCode::NotPositiveDefinite: return KIANC_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::Singular: return KIANC_ERR_SINGULAR;
    case ErrorCode::Numerical: return KIANC_ERR_NUMERICAL;
    case ErrorCode::NoFeasibleLambda: return KIANC_ERR_NO_FEASIBLE_LAMBDA;
    case ErrorCode::Io: return KIANC_ERR_IO;
  }
  return KIANC_ERR_INTERNAL;
}

template <class F>
kianc_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return KIANC_OK;
  } catch (const kianc::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return KIANC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return KIANC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return KIANC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw kianc::Error(kianc::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const kianc::RunResult& run_at(const kianc_result* r, size_t index) {
  need(r, "result");
  if (index >= r->result.runs.size()) throw kianc::Error(kianc::ErrorCode::InvalidArgument, "run index out of range");
  return r->result.runs[index];
}

}  // namespace

extern "C" {

const char* kianc_version(void) { return "0.1.0"; }

const char* kianc_last_error(void) { return last_error.c_str(); }

const char* kianc_status_name(kianc_status status) {
  switch (status) {
    case KIANC_OK: return "ok";
    case KIANC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KIANC_ERR_VALIDATION: return "validation error";
    case KIANC_ERR_DOMAIN: return "domain error";
    case KIANC_ERR_NOT_POSITIVE_DEFINITE: return "matrix not positive definite";
    case KIANC_ERR_SINGULAR: return "singular matrix";
    case KIANC_ERR_NUMERICAL: return "numerical failure";
    case KIANC_ERR_NO_FEASIBLE_LAMBDA: return "no feasible lambda";
    case KIANC_ERR_IO: return "i/o error";
    case KIANC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void kianc_string_free(char* s) { std::free(s); }

kianc_status kianc_config_new(kianc_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new kianc_config{};
  });
}

void kianc_config_free(kianc_config* config) { delete config; }

kianc_status kianc_config_apply_preset(kianc_config* config, const char* name) {
  return guarded([&] {
    need(config, "config");
    need(name, "name");
    kianc::apply_preset(config->config, name);
  });
}

kianc_status kianc_config_load_file(kianc_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    kianc::RunConfig staged = config->config;
    kianc::load_config_file(staged, path);
    config->config = std::move(staged);
  });
}

kianc_status kianc_config_load_text(kianc_config* config, const char* text) {
  return guarded([&] {
    need(config, "config");
    need(text, "text");
    kianc::RunConfig staged = config->config;
    kianc::load_config_text(staged, text);
    config->config = std::move(staged);
  });
}

kianc_status kianc_config_set(kianc_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    kianc::set_config_value(config->config, key, value);
  });
}

kianc_status kianc_config_get(const kianc_config* config, const char* key, char** value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    *value = dup_string(kianc::get_config_value(config->config, key));
  });
}

kianc_status kianc_config_paper_scale(kianc_config* config) {
  return guarded([&] {
    need(config, "config");
    kianc::apply_paper_scale(config->config);
  });
}

kianc_status kianc_config_validate(const kianc_config* config) {
  return guarded([&] {
    need(config, "config");
    kianc::validate_config(config->config);
  });
}

kianc_status kianc_config_to_ini(const kianc_config* config, char** text) {
  return guarded([&] {
    need(config, "config");
    need(text, "text");
    *text = dup_string(kianc::to_ini(config->config));
  });
}

kianc_status kianc_config_output_dir(const kianc_config* config, char** path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    *path = dup_string(kianc::resolve_output_dir(config->config).string());
  });
}

kianc_status kianc_run(const kianc_config* config, const char* scenario, kianc_result** out) {
  return guarded([&] {
    need(config, "config");
    need(scenario, "scenario");
    need(out, "out");
    *out = nullptr;
    const kianc::Scenario sc = kianc::parse_scenario(scenario);
    const kianc::ExperimentSetup setup = kianc::make_setup(config->config);
    const kianc::ExperimentPlan plan = kianc::make_plan(config->config, sc);
    auto* r = new kianc_result{kianc::run_experiment(setup, plan), plan.master_seed};
    *out = r;
  });
}

void kianc_result_free(kianc_result* result) { delete result; }

size_t kianc_result_run_count(const kianc_result* result) { return result ? result->result.runs.size() : 0; }

kianc_status kianc_result_run_summary(const kianc_result* result, size_t index, kianc_run_summary* out) {
  return guarded([&] {
    need(out, "out");
    const auto& run = run_at(result, index);
    const auto& s = run.summary;
    *out = kianc_run_summary{static_cast<kianc_algorithm>(s.algorithm),
                             s.frequency_hz,
                             s.seed,
                             s.penalty,
                             s.budget,
                             s.j_ext_hat,
                             s.final_p_red_db,
                             s.final_j_ext,
                             s.final_j_int,
                             s.final_w_frobenius,
                             run.trace.size(),
                             s.diverged ? 1 : 0};
  });
}

kianc_status kianc_result_run_records(const kianc_result* result, size_t index, kianc_record* records,
                                      size_t capacity, size_t* count) {
  return guarded([&] {
    need(count, "count");
    const auto& run = run_at(result, index);
    *count = run.trace.size();
    if (records == nullptr) return;
    for (size_t i = 0; i < std::min(capacity, run.trace.size()); ++i) {
      const auto& r = run.trace[i];
      records[i] = kianc_record{r.n, r.p_red_db, r.j_ext, r.j_int, r.w_frobenius};
    }
  });
}

size_t kianc_result_calibration_count(const kianc_result* result) {
  return result ? result->result.calibrations.size() : 0;
}

kianc_status kianc_result_calibration(const kianc_result* result, size_t index, kianc_calibration* out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    if (index >= result->result.calibrations.size()) {
      throw kianc::Error(kianc::ErrorCode::InvalidArgument, "calibration index out of range");
    }
    const auto& c = result->result.calibrations[index];
    *out = kianc_calibration{c.frequency_hz, c.j_ext_hat,     c.budget, c.wiener_p_red_db, c.condition_number,
                             c.loaded ? 1 : 0, c.penalty ? 1 : 0, c.penalty.value_or(0.0)};
  });
}

size_t kianc_result_failure_count(const kianc_result* result) { return result ? result->result.failures.size() : 0; }

kianc_status kianc_result_failure(const kianc_result* result, size_t index, double* freq_hz, char** message) {
  return guarded([&] {
    need(result, "result");
    if (index >= result->result.failures.size()) {
      throw kianc::Error(kianc::ErrorCode::InvalidArgument, "failure index out of range");
    }
    const auto& f = result->result.failures[index];
    if (freq_hz) *freq_hz = f.frequency_hz;
    if (message) *message = dup_string(f.message);
  });
}

size_t kianc_result_diverged_count(const kianc_result* result) {
  if (result == nullptr) return 0;
  size_t n = 0;
  for (const auto& r : result->result.runs) n += r.summary.diverged ? 1 : 0;
  return n;
}

size_t kianc_result_operator_builds(const kianc_result* result) { return result ? result->result.operator_builds : 0; }

kianc_status kianc_result_summary_json(const kianc_result* result, char** json) {
  return guarded([&] {
    need(result, "result");
    need(json, "json");
    *json = dup_string(kianc::summary_json(result->result, result->master_seed));
  });
}

kianc_status kianc_result_write(const kianc_result* result, const kianc_config* config, const char* dir) {
  return guarded([&] {
    need(result, "result");
    need(config, "config");
    need(dir, "dir");
    const std::filesystem::path out(dir);
    const auto& oc = config->config.output;
    kianc::emit_trace(result->result, result->master_seed, out, oc.traces);
    if (oc.plots) kianc::render_plots(result->result, out, oc.log_iterations);
    kianc::write_file_atomic(out / "resolved-config.ini", kianc::to_ini(config->config));
  });
}

kianc_status kianc_validate(const kianc_config* config, const char* dir, size_t* failed, char** report) {
  return guarded([&] {
    need(config, "config");
    const kianc::ExperimentSetup setup = kianc::make_setup(config->config);
    const double f = config->config.plan.frequency_hz;
    const kianc::ValidationReport rep = kianc::run_validation(setup, f, config->config.plan.seed);
    if (dir != nullptr) {
      const std::filesystem::path out(dir);
      kianc::write_file_atomic(out / "validation.json", rep.json());
      kianc::write_file_atomic(out / "operators.json", kianc::operators_json(kianc::build_operators(setup, f)));
      kianc::write_file_atomic(out / "resolved-config.ini", kianc::to_ini(config->config));
    }
    if (failed) *failed = rep.failed();
    if (report) *report = dup_string(rep.text());
  });
}

kianc_status kianc_export_operators(const kianc_config* config, double freq_hz, char** json) {
  return guarded([&] {
    need(config, "config");
    need(json, "json");
    *json = dup_string(kianc::operators_json(kianc::build_operators(kianc::make_setup(config->config), freq_hz)));
  });
}

kianc_status kianc_bessel_j0(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = kianc::math::bessel_j0(x);
  });
}

kianc_status kianc_bessel_y0(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = kianc::math::bessel_y0(x);
  });
}

}  // extern "C"
