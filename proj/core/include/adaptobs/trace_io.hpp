#pragma once

// Versioned CSV persistence of run traces and singularity events, and the
// run report, which is always computed from a trace so that a report can be
// rebuilt from the CSV files alone.

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptobs/observers.hpp"

namespace adaptobs {

inline constexpr const char* kTraceVersionLine = "# adaptobs trace v1";

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column-major-addressable table of doubles with named columns.
struct Trace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Scenario JSON the trace was produced with (single line).
  std::string scenario_json;
  /// Empty unless the run stopped early.
  std::string failure;

  std::size_t index(const std::string& column) const;  // throws SchemaError
  bool has(const std::string& column) const;
  std::vector<double> column(const std::string& name) const;
};

/// Column names of the v1 trace schema, in file order.
const std::vector<std::string>& trace_columns();

void write_trace_csv(const std::string& path, const Trace& trace);
Trace read_trace_csv(const std::string& path);

void write_events_csv(const std::string& path, const std::vector<SingularityEvent>& events);
std::vector<SingularityEvent> read_events_csv(const std::string& path);

struct RunReport {
  std::string model;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  double gamma = 0.0;
  double t_eps = 0.0;
  double t_end = 0.0;
  bool excitation = true;

  double terminal_x_tilde = std::numeric_limits<double>::quiet_NaN();
  double terminal_kappa_tilde = std::numeric_limits<double>::quiet_NaN();
  double terminal_x_tilde_baseline = std::numeric_limits<double>::quiet_NaN();

  bool fe_met = false;
  double t_e = std::numeric_limits<double>::quiet_NaN();
  double lambda_window_max = 0.0;
  double lambda_window_first_positive = std::numeric_limits<double>::quiet_NaN();
  double lambda_phi_final = 0.0;
  double delta_min_after_t_e = std::numeric_limits<double>::quiet_NaN();
  double delta_final = 0.0;

  double decay_rate = 0.0;
  double decay_r2 = 0.0;
  double decay_residual = 0.0;
  double decay_window_start = 0.0;
  double decay_window_end = 0.0;

  double identity_residual_max = 0.0;  // over t >= t_eps
  double equality_max = 0.0;
  double decomposition_max = 0.0;
  double max_jump_proposed = 0.0;
  double max_jump_baseline = 0.0;
  std::size_t events_proposed = 0;
  std::size_t events_baseline = 0;
  std::size_t guard_events_baseline = 0;

  double wall_clock_s = 0.0;
  bool diverged = false;
  std::string failure;
};

/// Derives every summary field from the trace and the event list. Wall clock
/// is not part of the trace and is left for the caller.
RunReport summarize(const Trace& trace, const std::vector<SingularityEvent>& events,
                    double decay_window = 30.0);

std::string report_to_json(const RunReport& r);
void write_report(const std::string& path, const RunReport& r);

}  // namespace adaptobs
