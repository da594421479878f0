// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kianc/acoustics.hpp"
#include "kianc/adaptive.hpp"
#include "kianc/harness.hpp"
#include "kianc/kernel_interp.hpp"
#include "kianc/radiation.hpp"

namespace kianc {

struct PlanConfig {
  double frequency_hz = 600.0;
  double sweep_start_hz = 100.0;
  double sweep_stop_hz = 1000.0;
  double sweep_step_hz = 100.0;
  std::size_t iterations = 50000;
  std::size_t sweep_iterations = 10000;
  std::vector<Algorithm> algorithms{Algorithm::Nlms, Algorithm::Penal, Algorithm::Const};
  std::vector<double> lambda_grid{0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::optional<double> penalty;  // unset: chosen by lambda search
  double budget_fraction = 0.5;
  std::uint64_t seed = 0x4b69414e43ULL;
  double snr_db = 40.0;
  std::size_t move_iteration = 25000;
  Position moved_source{-2.0, 0.2, 0.0};
  bool reset_on_move = false;
  std::size_t record_stride = 1;
  unsigned threads = 0;

  bool operator==(const PlanConfig&) const = default;
};

struct OutputConfig {
  std::string dir;  // empty: $KIANC_OUT_DIR, then ./kianc-out
  bool traces = true;
  bool plots = true;
  bool log_iterations = false;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  SceneLayout scene;
  double ridge = 1e-3;
  QuadratureSpec quadrature;
  RadiationOptions radiation;
  AlgorithmParams algorithm;
  PlanConfig plan;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

/// Resets the scene, algorithm and loading parameters to the published
/// experiment values. Known presets: "paper". Throws Error(Validation).
void apply_preset(RunConfig& config, std::string_view name);

/// Full-resolution sweep: 10 Hz steps and 50 000 iterations per frequency.
void apply_paper_scale(RunConfig& config);

/// Applies "section.key" = value. Errors name the key path.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& config, std::string_view key);
/// Every accepted "section.key", in file order.
std::vector<std::string> config_keys();

/// Sectioned INI text ([scene], [plan], [algorithm], [output]). Keys present
/// override the current values; unknown sections or keys are rejected.
void load_config_text(RunConfig& config, const std::string& text, std::string_view origin = "<config>");
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// INI text listing every key. Loading it into any RunConfig reproduces `config`.
std::string to_ini(const RunConfig& config);

/// Throws Error(Validation) naming the first offending key.
void validate_config(const RunConfig& config);

std::vector<double> sweep_frequencies(const PlanConfig& plan);
ExperimentSetup make_setup(const RunConfig& config);
ExperimentPlan make_plan(const RunConfig& config, Scenario scenario);

/// output.dir, else $KIANC_OUT_DIR, else "kianc-out".
std::filesystem::path resolve_output_dir(const RunConfig& config);

}  // namespace kianc
