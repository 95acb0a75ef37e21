#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "adaptobs/example_system.hpp"

namespace adaptobs {

enum class ObserverSelection { Proposed, Baseline, Both };

std::string to_string(ObserverSelection s);
ObserverSelection parse_observers(const std::string& s);

/// Numerical knobs of the estimator pipeline that are not model parameters.
struct PipelineOptions {
  double eps_k = 1e-19;
  double k_min = 1e-6;
  double k_max = 1e25;
  /// Regression normalization |M| + eps_norm·‖Y‖ for the κ flow and the
  /// baseline η flow.
  double eps_norm = 1e-3;
  double eps_div = 1e-8;
  /// Excitation monitor: windowed Gram over fe_window seconds, and the level
  /// of λ_min(φ) that marks the end t_e of the excitation interval.
  double fe_window = 1.0;
  double fe_alpha = 1e-9;
  std::size_t phi_stride = 10;
  bool gauge = true;
};

struct Scenario {
  std::string model = "paper-example";
  ExampleConfig params;
  PipelineOptions options;
  ObserverSelection observers = ObserverSelection::Both;
  std::string output_dir = "run";
  std::size_t decimation = 100;
  /// Time at which to dump every cascade stage (NaN: never).
  double dump_cascade_at = std::numeric_limits<double>::quiet_NaN();

  /// Throws ConfigError listing every invalid field.
  void validate() const;
};

/// Parses a JSON scenario. Keys mirror the symbols of the method: theta, rho,
/// f, K, sigma, t_eps, gamma, dt, t_end, x0, x_delta0, seed, plus the control
/// and pipeline blocks. Unknown keys are errors.
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

/// Applies "key=value" overrides; value is parsed as JSON (numbers, arrays,
/// booleans, strings).
void apply_override(Scenario& s, const std::string& assignment);

}  // namespace adaptobs
