// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kianc/harness.hpp"

namespace kianc {

/// Shortest decimal that reads back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double value);
/// Inverse of format_double. Throws Error(Validation) on malformed text.
double parse_double(std::string_view text);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws Error(Io) with the path on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

inline constexpr std::string_view kTraceHeader = "iter,algorithm,freq_hz,p_red_db,j_ext_w,j_int,w_frob";

struct TraceRow {
  Algorithm algorithm = Algorithm::Nlms;
  double frequency_hz = 0.0;
  IterationRecord record;

  bool operator==(const TraceRow&) const = default;
};

std::string trace_csv(const std::vector<const RunResult*>& runs);
std::vector<TraceRow> parse_trace_csv(std::string_view text);

std::string summary_json(const ExperimentResult& result, std::uint64_t master_seed);

/// trace.csv (or one trace-lambda-<value>.csv per grid point for a lambda
/// sweep) plus summary.json. Returns the written paths.
std::vector<std::filesystem::path> emit_trace(const ExperimentResult& result, std::uint64_t master_seed,
                                              const std::filesystem::path& dir, bool write_traces = true);

}  // namespace kianc
