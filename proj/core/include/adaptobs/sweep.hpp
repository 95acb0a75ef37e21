#pragma once

// Cartesian parameter sweeps over scenario overrides, run in parallel with
// one output directory per variation.

#include <string>
#include <vector>

#include "adaptobs/scenario.hpp"
#include "adaptobs/trace_io.hpp"

namespace adaptobs {

/// One swept key and its values, each a JSON literal.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "key=v1,v2,..."; commas inside brackets do not split, so
/// "x0=[1,0,0],[0,1,0]" yields two values.
SweepAxis parse_axis(const std::string& text);

struct SweepRow {
  std::size_t index = 0;
  std::string directory;
  std::vector<std::string> assignments;
  bool ok = false;
  std::string failure;
  RunReport report;
};

/// Runs every combination of the axes on top of base. Each variation writes
/// to base.output_dir/run_NNN. Failed variations are marked and the sweep
/// continues. With no axes a single variation identical to run(base) is made.
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<SweepAxis>& axes, std::size_t jobs = 0);

void write_sweep_summary(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace adaptobs
