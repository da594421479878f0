// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kianc/harness.hpp"

namespace kianc {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ReferenceLine {
  std::string label;
  double y = 0.0;
};

/// Minimal SVG line chart: axes with ticks, one polyline per series, dashed
/// horizontal reference lines and a legend. Non-finite points (and
/// non-positive ones on a log axis) break the polyline.
class LinePlot {
 public:
  LinePlot(std::string title, std::string x_label, std::string y_label);

  LinePlot& log_x(bool on = true);
  LinePlot& log_y(bool on = true);
  LinePlot& add(Series series);
  LinePlot& reference(ReferenceLine line);

  std::string render(int width = 760, int height = 460) const;

 private:
  std::string title_, x_label_, y_label_;
  bool log_x_ = false, log_y_ = false;
  std::vector<Series> series_;
  std::vector<ReferenceLine> references_;
};

/// Two SVG files per scenario: reduction and radiation against iteration,
/// lambda or frequency. Returns the written paths.
std::vector<std::filesystem::path> render_plots(const ExperimentResult& result, const std::filesystem::path& dir,
                                                bool log_iterations = false);

}  // namespace kianc
