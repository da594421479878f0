// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the simulator only through kianc.h.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kianc/kianc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

int exit_code(kianc_status s) {
  switch (s) {
    case KIANC_OK: return kExitOk;
    case KIANC_ERR_INVALID_ARGUMENT:
    case KIANC_ERR_VALIDATION: return kExitValidation;
    case KIANC_ERR_IO: return kExitIo;
    default: return kExitNumerical;
  }
}

struct CliError {
  int code;
};

void ensure(kianc_status s, const char* context) {
  if (s == KIANC_OK) return;
  std::fprintf(stderr, "kianc: %s: %s (%s)\n", context, kianc_last_error(), kianc_status_name(s));
  throw CliError{exit_code(s)};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  kianc_string_free(s);
  return out;
}

const char* algorithm_name(kianc_algorithm a) {
  switch (a) {
    case KIANC_NLMS: return "nlms";
    case KIANC_PENAL: return "penal";
    case KIANC_CONST: return "const";
  }
  return "?";
}

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool paper_scale = false;
};

using ConfigPtr = std::unique_ptr<kianc_config, decltype(&kianc_config_free)>;
using ResultPtr = std::unique_ptr<kianc_result, decltype(&kianc_result_free)>;

ConfigPtr build_config(const Options& opt) {
  kianc_config* raw = nullptr;
  ensure(kianc_config_new(&raw), "config");
  ConfigPtr cfg(raw, kianc_config_free);
  if (!opt.preset.empty()) ensure(kianc_config_apply_preset(cfg.get(), opt.preset.c_str()), "--preset");
  if (!opt.config_path.empty()) ensure(kianc_config_load_file(cfg.get(), opt.config_path.c_str()), "--config");
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "kianc: --set expects key=value, got '%s'\n", kv.c_str());
      throw CliError{kExitValidation};
    }
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    ensure(kianc_config_set(cfg.get(), key.c_str(), value.c_str()), "--set");
  }
  if (opt.paper_scale) ensure(kianc_config_paper_scale(cfg.get()), "--paper-scale");
  if (!opt.out_dir.empty()) ensure(kianc_config_set(cfg.get(), "output.dir", opt.out_dir.c_str()), "--out");
  ensure(kianc_config_validate(cfg.get()), "config");
  return cfg;
}

int run_scenario(const Options& opt, const std::string& scenario) {
  ConfigPtr cfg = build_config(opt);
  char* dir_raw = nullptr;
  ensure(kianc_config_output_dir(cfg.get(), &dir_raw), "output");
  const std::string dir = take(dir_raw);

  kianc_result* raw = nullptr;
  ensure(kianc_run(cfg.get(), scenario.c_str(), &raw), scenario.c_str());
  ResultPtr result(raw, kianc_result_free);
  ensure(kianc_result_write(result.get(), cfg.get(), dir.c_str()), "write");

  for (size_t i = 0; i < kianc_result_calibration_count(result.get()); ++i) {
    kianc_calibration c{};
    ensure(kianc_result_calibration(result.get(), i, &c), "calibration");
    std::printf("%7.1f Hz  J_ext(Wiener) %.4g W  C %.4g W  cond(A_ext) %.3g%s", c.freq_hz, c.j_ext_hat_w, c.budget_w,
                c.cond_a_ext, c.loaded ? " (loaded)" : "");
    if (c.has_lambda) std::printf("  lambda %g", c.lambda);
    std::printf("\n");
  }
  for (size_t i = 0; i < kianc_result_run_count(result.get()); ++i) {
    kianc_run_summary s{};
    ensure(kianc_result_run_summary(result.get(), i, &s), "summary");
    std::printf("%7.1f Hz  %-5s", s.freq_hz, algorithm_name(s.algorithm));
    if (s.algorithm == KIANC_PENAL) std::printf(" lambda %-6g", s.lambda);
    std::printf("  P_red %8.3f dB  J_ext %.4g W (%.3f of Wiener)%s\n", s.final_p_red_db, s.final_j_ext_w,
                s.j_ext_hat_w > 0 ? s.final_j_ext_w / s.j_ext_hat_w : 0.0, s.diverged ? "  DIVERGED" : "");
  }
  const size_t failures = kianc_result_failure_count(result.get());
  for (size_t i = 0; i < failures; ++i) {
    double f = 0.0;
    char* msg = nullptr;
    ensure(kianc_result_failure(result.get(), i, &f, &msg), "failure");
    std::fprintf(stderr, "kianc: warning: %.1f Hz: %s\n", f, take(msg).c_str());
  }
  std::printf("outputs written to %s\n", dir.c_str());

  if (kianc_result_diverged_count(result.get()) > 0) return kExitNumerical;
  if (failures > 0 && scenario != "freq-sweep") return kExitNumerical;
  return kExitOk;
}

int run_validate(const Options& opt) {
  ConfigPtr cfg = build_config(opt);
  char* dir_raw = nullptr;
  ensure(kianc_config_output_dir(cfg.get(), &dir_raw), "output");
  const std::string dir = take(dir_raw);
  size_t failed = 0;
  char* report = nullptr;
  ensure(kianc_validate(cfg.get(), dir.c_str(), &failed, &report), "validate");
  std::fputs(take(report).c_str(), stdout);
  std::printf("%zu check(s) failed; outputs written to %s\n", failed, dir.c_str());
  return failed == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial active noise control simulator with exterior radiation control"};
  app.set_version_flag("--version", std::string(kianc_version()));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config_path, "INI config file ([scene], [plan], [algorithm], [output])");
    sub->add_option("--preset", opt.preset, "Start from a named preset (paper)");
    sub->add_option("-o,--out", opt.out_dir, "Output directory (default: $KIANC_OUT_DIR or ./kianc-out)");
    sub->add_option("-s,--set", opt.overrides, "Override a config key, e.g. --set plan.iterations=20000")
        ->allow_extra_args(false);
    sub->add_flag("--paper-scale", opt.paper_scale, "Sweep at 10 Hz steps with 50000 iterations");
  };

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"converge", "Single-frequency convergence of the selected algorithms"},
      {"lambda-sweep", "Converged radiation and reduction of the penalty method across the lambda grid"},
      {"freq-sweep", "Per-frequency calibration and converged metrics across the sweep band"},
      {"moving-source", "Tracking after the primary source moves"},
      {"validate", "Oracle and invariant checks on the operators at plan.frequency"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const std::string name = commands[i].name;
      return name == "validate" ? run_validate(opt) : run_scenario(opt, name);
    }
  } catch (const CliError& e) {
    return e.code;
  }
  return kExitValidation;
}
