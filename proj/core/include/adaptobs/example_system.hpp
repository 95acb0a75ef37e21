#pragma once

// Third-order worked example: an uncertain plant with three physical
// parameters, a harmonic disturbance of unknown frequency, and hand-derived
// heterogeneous mappings for every cascade stage.

#include <cstdint>

#include "adaptobs/drem.hpp"
#include "adaptobs/filters.hpp"
#include "adaptobs/hetero.hpp"
#include "adaptobs/observers.hpp"
#include "adaptobs/plant.hpp"

namespace adaptobs {

struct ExampleConfig {
  Vector theta{1.0, 1.0, -1.0};
  double rho = -10.0;
  Vector f{-125.0, -75.0, -15.0};
  Vector k{3.0, 3.0, 1.0};
  double sigma = 1.0;
  double t_eps = 25.0;
  double gamma = 1.0;
  double dt = 1e-4;
  double t_end = 100.0;
  Vector x0{1.0, -1.0, 2.0};
  Vector x_delta0{1.0, 0.0};
  std::uint64_t seed = 20240607;

  // Control law u = −c(a·h(t−t_ε)sin(ωt)e^{−λ(t−t_ε)} + r − y).
  double control_gain = 75.0;
  double setpoint = 100.0;
  double excitation_amplitude = 2.5;
  double excitation_frequency = 10.0;
  double excitation_decay = 1.0;
  bool excitation = true;

  /// Throws ConfigError listing every violated field.
  void validate() const;
};

PlantModel example_plant(const ExampleConfig& cfg);
Exosystem example_exosystem(const ExampleConfig& cfg);

/// φ̄ keeps φ̄_e entries 2, 4, 6, 14, 26 (1-based); η merges the η_e pairs that
/// multiply the equal regressor entries (2, 8) and (6, 20).
Reduction example_reduction();
CascadeBundle example_bundle(const ExampleConfig& cfg);
BaselineMaps example_baseline_maps(const ExampleConfig& cfg);

/// Heaviside with h(0) = 1.
double example_control(double t, double y, const ExampleConfig& cfg);

// Closed forms in θ and ρ, used as ground truth.
Vector example_psi(const Vector& theta, double rho);  // [ψ_a; ψ_b; Γ]
double example_psi_d(const Vector& theta);
Vector example_eta(const Vector& theta, double rho);
Matrix example_t_i(const Vector& theta);
Matrix example_o_gamma(double rho, const Vector& f);
Vector example_true_kappa(const ExampleConfig& cfg);

}  // namespace adaptobs
