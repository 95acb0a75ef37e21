#pragma once

// One scenario end to end: plant and disturbance ground truth, filter bank,
// reduction and DREM from t_ε on, the regression cascade, the proposed and
// baseline observers, and the online instrumentation that lands in the trace.

#include <optional>
#include <string>
#include <vector>

#include "adaptobs/model.hpp"
#include "adaptobs/scenario.hpp"
#include "adaptobs/trace_io.hpp"

namespace adaptobs {

struct RunResult {
  Trace trace;
  std::vector<SingularityEvent> events;
  RunReport report;
  /// JSON of every cascade stage at the first step with t >= dump_cascade_at.
  std::optional<std::string> cascade_dump;
};

/// Initial estimates drawn from the scenario seed: κ̂₀ = 10·U(0,1)^{n_κ}
/// first, then η̂₀ = 10·U(0,1)^{n_η} for the baseline.
struct InitialEstimates {
  Vector kappa0;
  Vector eta0;
};
InitialEstimates draw_initial_estimates(std::uint64_t seed, std::size_t n_kappa, std::size_t n_eta);

/// Runs in memory. Divergence stops the run and is recorded in
/// trace.failure and report.diverged; it does not throw.
RunResult simulate(const Scenario& scenario);
RunResult simulate(const Scenario& scenario, const ModelInstance& model);

/// simulate() plus trace.csv, events.csv, report.json (and cascade.json when
/// requested) in scenario.output_dir. The report is recomputed from the
/// files just written.
RunResult run(const Scenario& scenario);

std::string cascade_dump_json(double t, const CascadeOutput& c, const NormalizedRegression& nr,
                              const MixedRegression& mixed);

}  // namespace adaptobs
