// SPDX-License-Identifier: Apache-2.0

#include "kianc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "kianc/error.hpp"
#include "kianc/output.hpp"

namespace kianc {

namespace {

[[noreturn]] void bad(std::string_view key, const std::string& what) {
  throw Error(ErrorCode::Validation, std::string(key) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double real_value(std::string_view key, std::string_view text) {
  try {
    return parse_double(trim(text));
  } catch (const Error&) {
    bad(key, "expected a number, got '" + std::string(text) + "'");
  }
}

template <class T>
T integer_value(std::string_view key, std::string_view text) {
  text = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    bad(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool bool_value(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  bad(key, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<double> real_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text)) out.push_back(real_value(key, item));
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

struct Key {
  std::string_view section;
  std::string_view name;
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;  // (config, path, value)
  std::function<std::string(const RunConfig&)> get;
};

template <class Member>
Key field_key(std::string_view section, std::string_view name, Member member) {
  using T = std::decay_t<decltype(std::invoke(member, std::declval<RunConfig&>()))>;
  Key key{section, name, nullptr, nullptr};
  key.set = [member](RunConfig& c, std::string_view k, std::string_view v) {
    T& ref = std::invoke(member, c);
    if constexpr (std::is_same_v<T, double>) {
      ref = real_value(k, v);
    } else if constexpr (std::is_same_v<T, bool>) {
      ref = bool_value(k, v);
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      ref = real_list(k, v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      ref = std::string(trim(v));
    } else {
      ref = integer_value<T>(k, v);
    }
  };
  key.get = [member](const RunConfig& c) -> std::string {
    const T& ref = std::invoke(member, const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, double>) {
      return format_double(ref);
    } else if constexpr (std::is_same_v<T, bool>) {
      return ref ? "true" : "false";
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      return join_reals(ref);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return ref;
    } else {
      return std::to_string(ref);
    }
  };
  return key;
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back(field_key("scene", "dimension", [](RunConfig& c) -> int& { return c.scene.dimension; }));
    t.push_back(field_key("scene", "target_radius", [](RunConfig& c) -> double& { return c.scene.target_radius; }));
    t.push_back(field_key("scene", "source_radii", [](RunConfig& c) -> std::vector<double>& { return c.scene.source_radii; }));
    t.push_back(field_key("scene", "sources_per_ring", [](RunConfig& c) -> int& { return c.scene.sources_per_ring; }));
    t.push_back(field_key("scene", "mic_radii", [](RunConfig& c) -> std::vector<double>& { return c.scene.mic_radii; }));
    t.push_back(field_key("scene", "mics_per_ring", [](RunConfig& c) -> int& { return c.scene.mics_per_ring; }));
    t.push_back(field_key("scene", "ring_offset", [](RunConfig& c) -> double& { return c.scene.ring_offset; }));
    t.push_back(field_key("scene", "primary_x", [](RunConfig& c) -> double& { return c.scene.primary_source.x; }));
    t.push_back(field_key("scene", "primary_y", [](RunConfig& c) -> double& { return c.scene.primary_source.y; }));
    t.push_back(field_key("scene", "primary_z", [](RunConfig& c) -> double& { return c.scene.primary_source.z; }));
    t.push_back(field_key("scene", "reference_count", [](RunConfig& c) -> int& { return c.scene.reference_count; }));
    t.push_back(field_key("scene", "eval_points", [](RunConfig& c) -> std::size_t& { return c.scene.eval_point_count; }));
    t.push_back(field_key("scene", "sound_speed", [](RunConfig& c) -> double& { return c.scene.sound_speed; }));
    t.push_back(field_key("scene", "air_density", [](RunConfig& c) -> double& { return c.scene.air_density; }));
    t.push_back(field_key("scene", "ridge", [](RunConfig& c) -> double& { return c.ridge; }));
    t.push_back(field_key("scene", "quadrature_refinement", [](RunConfig& c) -> int& { return c.quadrature.refinement; }));
    t.push_back(field_key("scene", "ball_order", [](RunConfig& c) -> int& { return c.quadrature.ball_order; }));

    t.push_back(field_key("plan", "frequency", [](RunConfig& c) -> double& { return c.plan.frequency_hz; }));
    t.push_back(field_key("plan", "sweep_start", [](RunConfig& c) -> double& { return c.plan.sweep_start_hz; }));
    t.push_back(field_key("plan", "sweep_stop", [](RunConfig& c) -> double& { return c.plan.sweep_stop_hz; }));
    t.push_back(field_key("plan", "sweep_step", [](RunConfig& c) -> double& { return c.plan.sweep_step_hz; }));
    t.push_back(field_key("plan", "iterations", [](RunConfig& c) -> std::size_t& { return c.plan.iterations; }));
    t.push_back(field_key("plan", "sweep_iterations", [](RunConfig& c) -> std::size_t& { return c.plan.sweep_iterations; }));
    t.push_back({"plan", "algorithms",
                 [](RunConfig& c, std::string_view k, std::string_view v) {
                   std::vector<Algorithm> algs;
                   for (auto item : split_list(v)) {
                     try {
                       algs.push_back(parse_algorithm(item));
                     } catch (const Error& e) {
                       bad(k, e.what());
                     }
                   }
                   c.plan.algorithms = std::move(algs);
                 },
                 [](const RunConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.plan.algorithms.size(); ++i) {
                     if (i) out += ", ";
                     out += to_string(c.plan.algorithms[i]);
                   }
                   return out;
                 }});
    t.push_back(field_key("plan", "lambda_grid", [](RunConfig& c) -> std::vector<double>& { return c.plan.lambda_grid; }));
    t.push_back({"plan", "penalty",
                 [](RunConfig& c, std::string_view k, std::string_view v) {
                   if (trim(v) == "auto") {
                     c.plan.penalty.reset();
                   } else {
                     c.plan.penalty = real_value(k, v);
                   }
                 },
                 [](const RunConfig& c) { return c.plan.penalty ? format_double(*c.plan.penalty) : std::string("auto"); }});
    t.push_back(field_key("plan", "budget_fraction", [](RunConfig& c) -> double& { return c.plan.budget_fraction; }));
    t.push_back(field_key("plan", "seed", [](RunConfig& c) -> std::uint64_t& { return c.plan.seed; }));
    t.push_back(field_key("plan", "snr_db", [](RunConfig& c) -> double& { return c.plan.snr_db; }));
    t.push_back(field_key("plan", "move_iteration", [](RunConfig& c) -> std::size_t& { return c.plan.move_iteration; }));
    t.push_back(field_key("plan", "moved_x", [](RunConfig& c) -> double& { return c.plan.moved_source.x; }));
    t.push_back(field_key("plan", "moved_y", [](RunConfig& c) -> double& { return c.plan.moved_source.y; }));
    t.push_back(field_key("plan", "moved_z", [](RunConfig& c) -> double& { return c.plan.moved_source.z; }));
    t.push_back(field_key("plan", "reset_on_move", [](RunConfig& c) -> bool& { return c.plan.reset_on_move; }));
    t.push_back(field_key("plan", "record_stride", [](RunConfig& c) -> std::size_t& { return c.plan.record_stride; }));
    t.push_back(field_key("plan", "threads", [](RunConfig& c) -> unsigned& { return c.plan.threads; }));

    t.push_back(field_key("algorithm", "mu0", [](RunConfig& c) -> double& { return c.algorithm.mu0; }));
    t.push_back(field_key("algorithm", "beta", [](RunConfig& c) -> double& { return c.algorithm.beta; }));
    t.push_back(field_key("algorithm", "alpha", [](RunConfig& c) -> double& { return c.algorithm.alpha; }));
    t.push_back(field_key("algorithm", "warmup", [](RunConfig& c) -> int& { return c.algorithm.warmup; }));
    t.push_back(field_key("algorithm", "cond_threshold", [](RunConfig& c) -> double& { return c.radiation.cond_threshold; }));
    t.push_back(field_key("algorithm", "eta", [](RunConfig& c) -> double& { return c.radiation.eta; }));

    t.push_back(field_key("output", "dir", [](RunConfig& c) -> std::string& { return c.output.dir; }));
    t.push_back(field_key("output", "traces", [](RunConfig& c) -> bool& { return c.output.traces; }));
    t.push_back(field_key("output", "plots", [](RunConfig& c) -> bool& { return c.output.plots; }));
    t.push_back(field_key("output", "log_iterations", [](RunConfig& c) -> bool& { return c.output.log_iterations; }));
    return t;
  }();
  return table;
}

const Key* find_key(std::string_view path) {
  const auto dot = path.find('.');
  if (dot == std::string_view::npos) return nullptr;
  const auto section = path.substr(0, dot);
  const auto name = path.substr(dot + 1);
  for (const auto& k : key_table()) {
    if (k.section == section && k.name == name) return &k;
  }
  return nullptr;
}

bool known_section(std::string_view s) { return s == "scene" || s == "plan" || s == "algorithm" || s == "output"; }

void require(bool ok, std::string_view key, const std::string& what) {
  if (!ok) bad(key, what);
}

}  // namespace

void apply_preset(RunConfig& config, std::string_view name) {
  if (name != "paper") throw Error(ErrorCode::Validation, "unknown preset '" + std::string(name) + "' (known: paper)");
  const RunConfig defaults;
  config.scene = SceneLayout{};
  config.ridge = defaults.ridge;
  config.quadrature = defaults.quadrature;
  config.radiation = RadiationOptions{};
  config.algorithm = AlgorithmParams{};
}

void apply_paper_scale(RunConfig& config) {
  config.plan.sweep_step_hz = 10.0;
  config.plan.sweep_iterations = 50000;
  config.plan.iterations = 50000;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Key* k = find_key(key);
  if (k == nullptr) throw Error(ErrorCode::Validation, "unknown key '" + std::string(key) + "'");
  k->set(config, key, value);
}

std::string get_config_value(const RunConfig& config, std::string_view key) {
  const Key* k = find_key(key);
  if (k == nullptr) throw Error(ErrorCode::Validation, "unknown key '" + std::string(key) + "'");
  return k->get(config);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(std::string(k.section) + "." + std::string(k.name));
  return out;
}

void load_config_text(RunConfig& config, const std::string& text, std::string_view origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::Validation, std::string(origin) + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw Error(ErrorCode::Validation,
                  std::string(origin) + ": key '" + section + "' must appear inside a [section]");
    }
    if (!known_section(section)) {
      throw Error(ErrorCode::Validation, std::string(origin) + ": unknown section '" + section + "'");
    }
    for (const auto& [name, node] : body) {
      const std::string path = section + "." + name;
      const Key* k = find_key(path);
      if (k == nullptr) throw Error(ErrorCode::Validation, std::string(origin) + ": unknown key '" + path + "'");
      k->set(config, path, node.data());
    }
  }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  load_config_text(config, buf.str(), path.string());
}

std::string to_ini(const RunConfig& config) {
  std::ostringstream out;
  out << "; resolved kianc configuration\n";
  std::string_view section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      section = k.section;
      out << "\n[" << section << "]\n";
    }
    out << k.name << " = " << k.get(config) << "\n";
  }
  return out.str();
}

void validate_config(const RunConfig& c) {
  const auto& s = c.scene;
  require(s.dimension == 2 || s.dimension == 3, "scene.dimension", "must be 2 or 3");
  require(s.target_radius > 0.0 && std::isfinite(s.target_radius), "scene.target_radius", "must be positive");
  require(!s.source_radii.empty(), "scene.source_radii", "must list at least one radius");
  for (double r : s.source_radii) require(r > s.target_radius, "scene.source_radii", "every ring must lie outside the target region");
  require(!s.mic_radii.empty(), "scene.mic_radii", "must list at least one radius");
  for (double r : s.mic_radii) require(r > 0.0, "scene.mic_radii", "radii must be positive");
  require(s.sources_per_ring >= 1, "scene.sources_per_ring", "must be at least 1");
  require(s.mics_per_ring >= 1, "scene.mics_per_ring", "must be at least 1");
  require(std::isfinite(s.ring_offset), "scene.ring_offset", "must be finite");
  require(s.reference_count >= 1, "scene.reference_count", "must be at least 1");
  require(s.eval_point_count >= 1, "scene.eval_points", "must be at least 1");
  require(s.sound_speed > 0.0, "scene.sound_speed", "must be positive");
  require(s.air_density > 0.0, "scene.air_density", "must be positive");
  require(c.ridge >= 0.0 && std::isfinite(c.ridge), "scene.ridge", "must be finite and >= 0");
  require(c.quadrature.refinement >= 1, "scene.quadrature_refinement", "must be at least 1");
  require(c.quadrature.ball_order >= 1, "scene.ball_order", "must be at least 1");

  const auto& p = c.plan;
  require(p.frequency_hz > 0.0 && std::isfinite(p.frequency_hz), "plan.frequency", "must be positive");
  require(p.sweep_start_hz > 0.0 && std::isfinite(p.sweep_start_hz), "plan.sweep_start", "must be positive");
  require(p.sweep_stop_hz > p.sweep_start_hz && std::isfinite(p.sweep_stop_hz), "plan.sweep_stop", "must exceed plan.sweep_start");
  require(p.sweep_step_hz > 0.0 && std::isfinite(p.sweep_step_hz), "plan.sweep_step", "must be positive");
  require(!p.algorithms.empty(), "plan.algorithms", "must name at least one algorithm");
  require(!p.lambda_grid.empty(), "plan.lambda_grid", "must not be empty");
  for (double l : p.lambda_grid) require(l >= 0.0 && std::isfinite(l), "plan.lambda_grid", "values must be finite and >= 0");
  if (p.penalty) require(*p.penalty >= 0.0 && std::isfinite(*p.penalty), "plan.penalty", "must be 'auto' or a finite value >= 0");
  require(p.budget_fraction > 0.0 && p.budget_fraction <= 1.0, "plan.budget_fraction", "must lie in (0, 1]");
  require(p.snr_db >= 0.0, "plan.snr_db", "must be >= 0 dB or inf");
  require(p.move_iteration >= 1, "plan.move_iteration", "must be at least 1");
  require(p.record_stride >= 1, "plan.record_stride", "must be at least 1");

  const auto& a = c.algorithm;
  require(a.mu0 > 0.0 && a.mu0 < 2.0, "algorithm.mu0", "must lie in (0, 2), got " + format_double(a.mu0));
  require(a.beta > 0.0 && std::isfinite(a.beta), "algorithm.beta", "must be positive");
  require(a.alpha > 0.0 && a.alpha < 1.0, "algorithm.alpha", "must lie in (0, 1), got " + format_double(a.alpha));
  require(a.warmup >= 1, "algorithm.warmup", "must be at least 1");
  require(c.radiation.cond_threshold >= 1.0, "algorithm.cond_threshold", "must be >= 1");
  require(c.radiation.eta > 0.0 && std::isfinite(c.radiation.eta), "algorithm.eta", "must be positive");
}

std::vector<double> sweep_frequencies(const PlanConfig& plan) {
  const double span = (plan.sweep_stop_hz - plan.sweep_start_hz) / plan.sweep_step_hz;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(plan.sweep_start_hz + static_cast<double>(i) * plan.sweep_step_hz);
  return out;
}

ExperimentSetup make_setup(const RunConfig& config) {
  validate_config(config);
  ExperimentSetup setup;
  setup.scene = build_scene(config.scene);
  setup.params = config.algorithm;
  setup.ridge = config.ridge;
  setup.quadrature = config.quadrature;
  setup.radiation = config.radiation;
  return setup;
}

ExperimentPlan make_plan(const RunConfig& config, Scenario scenario) {
  validate_config(config);
  const PlanConfig& p = config.plan;
  ExperimentPlan plan;
  plan.scenario = scenario;
  if (scenario == Scenario::FreqSweep) {
    plan.frequencies = sweep_frequencies(p);
    plan.iterations = p.sweep_iterations;
  } else {
    plan.frequencies = {p.frequency_hz};
    plan.iterations = p.iterations;
  }
  plan.algorithms = p.algorithms;
  plan.lambda_grid = p.lambda_grid;
  plan.fixed_penalty = p.penalty;
  plan.budget_fraction = p.budget_fraction;
  plan.master_seed = p.seed;
  plan.snr_db = p.snr_db;
  plan.move_iteration = p.move_iteration;
  plan.moved_source = p.moved_source;
  plan.reset_on_move = p.reset_on_move;
  plan.record_stride = p.record_stride;
  plan.threads = p.threads;
  return plan;
}

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (!config.output.dir.empty()) return config.output.dir;
  if (const char* env = std::getenv("KIANC_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "kianc-out";
}

}  // namespace kianc
