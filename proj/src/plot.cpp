// SPDX-License-Identifier: Apache-2.0

#include "kianc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "kianc/error.hpp"
#include "kianc/output.hpp"

namespace kianc {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
constexpr const char* kReferencePalette[] = {"#444444", "#b22222", "#006400", "#4b0082"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

class Axis {
 public:
  Axis(bool log, double lo, double hi, double px_lo, double px_hi)
      : log_(log), px_lo_(px_lo), px_hi_(px_hi) {
    if (!(lo < hi)) {
      const double pad = log ? 2.0 : (lo == 0.0 ? 1.0 : 0.1 * std::abs(lo));
      lo = log ? lo / pad : lo - pad;
      hi = log ? hi * pad : hi + pad;
    }
    lo_ = log ? std::log10(lo) : lo;
    hi_ = log ? std::log10(hi) : hi;
  }

  bool usable(double v) const { return std::isfinite(v) && (!log_ || v > 0.0); }

  double map(double v) const {
    const double t = ((log_ ? std::log10(v) : v) - lo_) / (hi_ - lo_);
    return px_lo_ + t * (px_hi_ - px_lo_);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log_) {
      const int a = static_cast<int>(std::floor(lo_ + 1e-9)), b = static_cast<int>(std::ceil(hi_ - 1e-9));
      const bool sparse = b - a <= 2;
      for (int e = a; e <= b; ++e) {
        for (double m : sparse ? std::vector<double>{1, 2, 5} : std::vector<double>{1}) {
          const double v = m * std::pow(10.0, e);
          const double lv = std::log10(v);
          if (lv >= lo_ - 1e-9 && lv <= hi_ + 1e-9) out.push_back(v);
        }
      }
      return out;
    }
    const double raw = (hi_ - lo_) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo_ / step - 1e-9) * step; v <= hi_ + 1e-9 * step; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }

 private:
  bool log_;
  double lo_ = 0.0, hi_ = 1.0;
  double px_lo_, px_hi_;
};

void bounds(double v, double& lo, double& hi) {
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

}  // namespace

LinePlot::LinePlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

LinePlot& LinePlot::log_x(bool on) {
  log_x_ = on;
  return *this;
}

LinePlot& LinePlot::log_y(bool on) {
  log_y_ = on;
  return *this;
}

LinePlot& LinePlot::add(Series series) {
  series_.push_back(std::move(series));
  return *this;
}

LinePlot& LinePlot::reference(ReferenceLine line) {
  references_.push_back(std::move(line));
  return *this;
}

std::string LinePlot::render(int width, int height) const {
  const double left = 86, right = width - 190.0, top = 44, bottom = height - 58.0;
  const double inf = std::numeric_limits<double>::infinity();
  double x_lo = inf, x_hi = -inf, y_lo = inf, y_hi = -inf;
  auto ok = [](bool log, double v) { return std::isfinite(v) && (!log || v > 0.0); };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(log_x_, s.x[i]) || !ok(log_y_, s.y[i])) continue;
      bounds(s.x[i], x_lo, x_hi);
      bounds(s.y[i], y_lo, y_hi);
    }
  }
  for (const auto& r : references_) {
    if (ok(log_y_, r.y)) bounds(r.y, y_lo, y_hi);
  }
  if (!std::isfinite(x_lo)) x_lo = log_x_ ? 1.0 : 0.0, x_hi = log_x_ ? 10.0 : 1.0;
  if (!std::isfinite(y_lo)) y_lo = log_y_ ? 1.0 : 0.0, y_hi = log_y_ ? 10.0 : 1.0;
  if (!log_y_ && y_hi > y_lo) {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }
  const Axis ax(log_x_, x_lo, x_hi, left, right);
  const Axis ay(log_y_, y_lo, y_hi, bottom, top);

  std::ostringstream o;
  o.precision(6);
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << (left + right) / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_)
    << "</text>\n";

  o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : ax.ticks()) o << "<line x1=\"" << ax.map(t) << "\" y1=\"" << top << "\" x2=\"" << ax.map(t) << "\" y2=\"" << bottom << "\"/>\n";
  for (double t : ay.ticks()) o << "<line x1=\"" << left << "\" y1=\"" << ay.map(t) << "\" x2=\"" << right << "\" y2=\"" << ay.map(t) << "\"/>\n";
  o << "</g>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left << "\" height=\"" << bottom - top
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    o << "<text x=\"" << ax.map(t) << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    o << "<text x=\"" << left - 6 << "\" y=\"" << ay.map(t) + 4 << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">" << escape(x_label_)
    << "</text>\n";
  o << "<text transform=\"translate(18," << (top + bottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label_) << "</text>\n";

  o << "<defs><clipPath id=\"plot-area\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
    << "\" height=\"" << bottom - top << "\"/></clipPath></defs>\n<g clip-path=\"url(#plot-area)\" fill=\"none\">\n";
  for (std::size_t k = 0; k < series_.size(); ++k) {
    const auto& s = series_[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream pts;
    pts.precision(6);
    auto flush = [&] {
      const std::string p = pts.str();
      if (!p.empty()) o << "<polyline stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"" << p << "\"/>\n";
      pts.str("");
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
        flush();
        continue;
      }
      pts << ax.map(s.x[i]) << ',' << ay.map(s.y[i]) << ' ';
    }
    flush();
  }
  for (std::size_t k = 0; k < references_.size(); ++k) {
    const auto& r = references_[k];
    if (!ay.usable(r.y)) continue;
    o << "<line x1=\"" << left << "\" y1=\"" << ay.map(r.y) << "\" x2=\"" << right << "\" y2=\"" << ay.map(r.y)
      << "\" stroke=\"" << kReferencePalette[k % std::size(kReferencePalette)]
      << "\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n";
  }
  o << "</g>\n";

  double ly = top + 8;
  for (std::size_t k = 0; k < series_.size(); ++k, ly += 18) {
    o << "<line x1=\"" << right + 14 << "\" y1=\"" << ly << "\" x2=\"" << right + 38 << "\" y2=\"" << ly << "\" stroke=\""
      << kPalette[k % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << right + 44 << "\" y=\"" << ly + 4 << "\">" << escape(series_[k].label) << "</text>\n";
  }
  for (std::size_t k = 0; k < references_.size(); ++k, ly += 18) {
    o << "<line x1=\"" << right + 14 << "\" y1=\"" << ly << "\" x2=\"" << right + 38 << "\" y2=\"" << ly << "\" stroke=\""
      << kReferencePalette[k % std::size(kReferencePalette)] << "\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n"
      << "<text x=\"" << right + 44 << "\" y=\"" << ly + 4 << "\">" << escape(references_[k].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

std::string run_label(const RunSummary& s, bool with_frequency) {
  std::string label(to_string(s.algorithm));
  if (s.algorithm == Algorithm::Penal) label += " (lambda " + format_double(s.penalty) + ")";
  if (with_frequency) label += " @ " + format_double(s.frequency_hz) + " Hz";
  return label;
}

std::vector<std::filesystem::path> iteration_plots(const ExperimentResult& result, const std::filesystem::path& dir,
                                                   bool log_iterations) {
  const std::string axis = log_iterations ? "iteration + 1" : "iteration";
  LinePlot reduction("Regional noise power reduction", axis, "P_red [dB]");
  LinePlot radiation("Exterior radiation power", axis, "J_ext [W]");
  reduction.log_x(log_iterations);
  radiation.log_x(log_iterations).log_y();
  for (const auto& run : result.runs) {
    Series p{run_label(run.summary, false), {}, {}}, j{run_label(run.summary, false), {}, {}};
    for (const auto& r : run.trace) {
      const double x = static_cast<double>(r.n) + (log_iterations ? 1.0 : 0.0);
      p.x.push_back(x);
      p.y.push_back(r.p_red_db);
      j.x.push_back(x);
      j.y.push_back(r.j_ext);
    }
    reduction.add(std::move(p));
    radiation.add(std::move(j));
  }
  if (!result.calibrations.empty()) {
    const auto& c = result.calibrations.front();
    radiation.reference({"Wiener J_ext", c.j_ext_hat});
    radiation.reference({"half of Wiener J_ext", 0.5 * c.j_ext_hat});
    radiation.reference({"budget C", c.budget});
  }
  const auto p_path = dir / "p-red-vs-iteration.svg", j_path = dir / "j-ext-vs-iteration.svg";
  write_file_atomic(p_path, reduction.render());
  write_file_atomic(j_path, radiation.render());
  return {p_path, j_path};
}

std::vector<std::filesystem::path> lambda_plots(const ExperimentResult& result, const std::filesystem::path& dir) {
  LinePlot radiation("Exterior radiation power after convergence", "lambda [kg/s]", "J_ext [W]");
  LinePlot reduction("Regional noise power reduction after convergence", "lambda [kg/s]", "P_red [dB]");
  std::map<double, Series> j, p;
  for (const auto& pt : result.lambda_curve) {
    auto& js = j[pt.frequency_hz];
    auto& ps = p[pt.frequency_hz];
    js.label = ps.label = "penal @ " + format_double(pt.frequency_hz) + " Hz";
    js.x.push_back(pt.penalty);
    js.y.push_back(pt.final_j_ext);
    ps.x.push_back(pt.penalty);
    ps.y.push_back(pt.final_p_red_db);
  }
  for (auto& [f, s] : j) radiation.add(std::move(s));
  for (auto& [f, s] : p) reduction.add(std::move(s));
  if (!result.calibrations.empty()) {
    const auto& c = result.calibrations.front();
    radiation.reference({"Wiener J_ext", c.j_ext_hat});
    radiation.reference({"half of Wiener J_ext", 0.5 * c.j_ext_hat});
    radiation.reference({"budget C", c.budget});
    reduction.reference({"Wiener solution", c.wiener_p_red_db});
  }
  const auto j_path = dir / "j-ext-vs-lambda.svg", p_path = dir / "p-red-vs-lambda.svg";
  write_file_atomic(j_path, radiation.render());
  write_file_atomic(p_path, reduction.render());
  return {j_path, p_path};
}

std::vector<std::filesystem::path> frequency_plots(const ExperimentResult& result, const std::filesystem::path& dir) {
  LinePlot reduction("Regional noise power reduction after convergence", "frequency [Hz]", "P_red [dB]");
  LinePlot radiation("Exterior radiation power after convergence", "frequency [Hz]", "J_ext [W]");
  radiation.log_y();
  std::map<Algorithm, std::pair<Series, Series>> by_alg;
  for (const auto& run : result.runs) {
    auto& [p, j] = by_alg[run.summary.algorithm];
    p.label = j.label = std::string(to_string(run.summary.algorithm));
    p.x.push_back(run.summary.frequency_hz);
    p.y.push_back(run.summary.final_p_red_db);
    j.x.push_back(run.summary.frequency_hz);
    j.y.push_back(run.summary.final_j_ext);
  }
  Series wiener_p{"Wiener solution", {}, {}}, wiener_j{"Wiener solution", {}, {}}, budget{"budget C", {}, {}};
  for (const auto& c : result.calibrations) {
    wiener_p.x.push_back(c.frequency_hz);
    wiener_p.y.push_back(c.wiener_p_red_db);
    wiener_j.x.push_back(c.frequency_hz);
    wiener_j.y.push_back(c.j_ext_hat);
    budget.x.push_back(c.frequency_hz);
    budget.y.push_back(c.budget);
  }
  for (auto& [a, pj] : by_alg) {
    reduction.add(std::move(pj.first));
    radiation.add(std::move(pj.second));
  }
  reduction.add(std::move(wiener_p));
  radiation.add(std::move(wiener_j));
  radiation.add(std::move(budget));
  const auto p_path = dir / "p-red-vs-frequency.svg", j_path = dir / "j-ext-vs-frequency.svg";
  write_file_atomic(p_path, reduction.render());
  write_file_atomic(j_path, radiation.render());
  return {p_path, j_path};
}

}  // namespace

std::vector<std::filesystem::path> render_plots(const ExperimentResult& result, const std::filesystem::path& dir,
                                                bool log_iterations) {
  switch (result.scenario) {
    case Scenario::Convergence:
    case Scenario::MovingSource: return iteration_plots(result, dir, log_iterations);
    case Scenario::LambdaSweep: return lambda_plots(result, dir);
    case Scenario::FreqSweep: return frequency_plots(result, dir);
  }
  return {};
}

}  // namespace kianc
