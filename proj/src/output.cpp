// SPDX-License-Identifier: Apache-2.0

#include "kianc/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <system_error>

#include "json.hpp"

#include "kianc/error.hpp"

namespace kianc {

namespace {

using nlohmann::ordered_json;

// NaN and infinities have no JSON literal; they become null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string_view next_field(std::string_view& line) {
  const auto comma = line.find(',');
  std::string_view field = line.substr(0, comma);
  line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
  return field;
}

[[noreturn]] void bad_row(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::Validation, "trace csv line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Validation, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::string target = "cannot write " + path.string() + ": ";
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, target + "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::random_device rd;
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, target + "cannot open temporary file " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::Io, target + "write to " + tmp.string() + " failed");
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorCode::Io, target + "rename from " + tmp.string() + " failed: " + ec.message());
  }
}

std::string trace_csv(const std::vector<const RunResult*>& runs) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const RunResult* run : runs) {
    const std::string alg(to_string(run->summary.algorithm));
    const std::string freq = format_double(run->summary.frequency_hz);
    for (const auto& r : run->trace) {
      out += std::to_string(r.n);
      out += ',';
      out += alg;
      out += ',';
      out += freq;
      for (double v : {r.p_red_db, r.j_ext, r.j_int, r.w_frobenius}) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<TraceRow> parse_trace_csv(std::string_view text) {
  std::vector<TraceRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kTraceHeader) bad_row(line_no, "unexpected header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    TraceRow row;
    try {
      const std::string_view iter = next_field(line);
      const auto [ptr, ec] = std::from_chars(iter.data(), iter.data() + iter.size(), row.record.n);
      if (ec != std::errc() || ptr != iter.data() + iter.size() || iter.empty()) {
        throw Error(ErrorCode::Validation, "bad iteration index");
      }
      row.algorithm = parse_algorithm(next_field(line));
      row.frequency_hz = parse_double(next_field(line));
      row.record.p_red_db = parse_double(next_field(line));
      row.record.j_ext = parse_double(next_field(line));
      row.record.j_int = parse_double(next_field(line));
      row.record.w_frobenius = parse_double(next_field(line));
    } catch (const Error& e) {
      bad_row(line_no, e.what());
    }
    if (!line.empty()) bad_row(line_no, "too many fields");
    rows.push_back(row);
  }
  if (!header_seen) throw Error(ErrorCode::Validation, "trace csv: missing header");
  return rows;
}

std::string summary_json(const ExperimentResult& result, std::uint64_t master_seed) {
  ordered_json j;
  j["scenario"] = std::string(to_string(result.scenario));
  j["master_seed"] = master_seed;
  j["operator_builds"] = result.operator_builds;

  ordered_json cals = ordered_json::array();
  for (const auto& c : result.calibrations) {
    ordered_json o;
    o["freq_hz"] = number(c.frequency_hz);
    o["j_ext_hat_w"] = number(c.j_ext_hat);
    o["budget_w"] = number(c.budget);
    o["wiener_p_red_db"] = number(c.wiener_p_red_db);
    o["cond_a_ext"] = number(c.condition_number);
    o["loaded"] = c.loaded;
    o["lambda"] = c.penalty ? number(*c.penalty) : ordered_json(nullptr);
    cals.push_back(std::move(o));
  }
  j["calibrations"] = std::move(cals);

  ordered_json runs = ordered_json::array();
  for (const auto& r : result.runs) {
    const RunSummary& s = r.summary;
    ordered_json o;
    o["algorithm"] = std::string(to_string(s.algorithm));
    o["freq_hz"] = number(s.frequency_hz);
    o["seed"] = s.seed;
    o["lambda"] = number(s.penalty);
    o["budget_w"] = number(s.budget);
    o["j_ext_hat_w"] = number(s.j_ext_hat);
    o["final_p_red_db"] = number(s.final_p_red_db);
    o["final_j_ext_w"] = number(s.final_j_ext);
    o["final_j_int"] = number(s.final_j_int);
    o["final_w_frob"] = number(s.final_w_frobenius);
    o["records"] = r.trace.size();
    o["diverged"] = s.diverged;
    if (s.diverged) o["diagnostic"] = s.diagnostic;
    runs.push_back(std::move(o));
  }
  j["runs"] = std::move(runs);

  ordered_json curve = ordered_json::array();
  for (const auto& p : result.lambda_curve) {
    curve.push_back(ordered_json{{"freq_hz", number(p.frequency_hz)},
                                 {"lambda", number(p.penalty)},
                                 {"final_j_ext_w", number(p.final_j_ext)},
                                 {"final_p_red_db", number(p.final_p_red_db)}});
  }
  j["lambda_curve"] = std::move(curve);

  ordered_json failures = ordered_json::array();
  for (const auto& f : result.failures) {
    failures.push_back(ordered_json{{"freq_hz", number(f.frequency_hz)}, {"message", f.message}});
  }
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_trace(const ExperimentResult& result, std::uint64_t master_seed,
                                              const std::filesystem::path& dir, bool write_traces) {
  std::vector<std::filesystem::path> written;
  if (write_traces) {
    if (result.scenario == Scenario::LambdaSweep) {
      for (const auto& run : result.runs) {
        const auto path = dir / ("trace-lambda-" + format_double(run.summary.penalty) + ".csv");
        write_file_atomic(path, trace_csv({&run}));
        written.push_back(path);
      }
    } else {
      std::vector<const RunResult*> all;
      for (const auto& run : result.runs) all.push_back(&run);
      const auto path = dir / "trace.csv";
      write_file_atomic(path, trace_csv(all));
      written.push_back(path);
    }
  }
  const auto summary = dir / "summary.json";
  write_file_atomic(summary, summary_json(result, master_seed));
  written.push_back(summary);
  return written;
}

}  // namespace kianc
