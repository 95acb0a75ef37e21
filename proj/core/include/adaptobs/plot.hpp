#pragma once

// Minimal embedded SVG line plotter and the three standard figures of a run.

#include <string>
#include <vector>

#include "adaptobs/trace_io.hpp"

namespace adaptobs {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

/// Vertically stacked panels sharing the x axis. Non-finite points (and
/// non-positive ones on log axes) break the polyline.
std::string render_svg(const std::vector<Panel>& panels, const std::string& x_label,
                       double width = 900.0, double panel_height = 300.0);

/// Writes regression.svg, parameter_errors.svg and state_errors.svg into
/// out_dir and returns their paths. Missing trace columns raise SchemaError.
std::vector<std::string> emit_plots(const Trace& trace, const std::string& out_dir);
/// Same, reading trace.csv from a run directory and writing next to it.
std::vector<std::string> emit_plots(const std::string& run_dir);

}  // namespace adaptobs
