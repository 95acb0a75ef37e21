#pragma once

// Dimensionality reduction of the extended regression and dynamic regressor
// extension and mixing (DREM): turns the vector regression q̄ = φ̄ᵀη into n_η
// decoupled scalar regressions Y_i = Δ·η_i with a shared scalar regressor Δ.

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adaptobs/matrix.hpp"

namespace adaptobs {

class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Model-supplied reduction: φ̄ = D_ηᵀφ̄_e and η = L_ηη_e.
struct Reduction {
  Matrix d_eta;  // n_e × n_η
  Matrix l_eta;  // n_η × n_e
  std::size_t extended_dim() const { return d_eta.rows(); }
  std::size_t reduced_dim() const { return d_eta.cols(); }
  /// Throws DimensionError unless the shapes agree and n_η < n_e.
  void validate() const;
};

struct ReducedRegression {
  Vector phi_bar;
  double q_bar = 0.0;
};

ReducedRegression reduce(std::span<const double> phi_e, double q_bar, const Reduction& r);
void reduce_into(std::span<const double> phi_e, const Reduction& r, std::span<double> phi_bar);

struct DremConfig {
  double sigma = 1.0;
  double t_eps = 25.0;
  double eps_k = 1e-19;
  double k_min = 1e-6;
  double k_max = 1e25;
};

/// Weighted extension integrals, started at t_ε:
///   q(t) = ∫ e^{−σ(τ−t_ε)} φ̄ q̄ dτ,  φ(t) = ∫ e^{−σ(τ−t_ε)} φ̄φ̄ᵀ dτ.
struct DremState {
  DremConfig config;
  Vector q;
  Matrix phi;
  bool started = false;
  double t_last = 0.0;
  Vector prev_phi_bar;
  double prev_q_bar = 0.0;
  double prev_weight = 0.0;

  static DremState make(std::size_t n_eta, const DremConfig& cfg);
};

/// Adds the trapezoid panel ending at sample time t. The first call (at or
/// after t_ε) only records the sample, so the integrals start from zero.
/// Throws SequencingError when t < t_ε or t does not advance.
void step_extension(DremState& state, std::span<const double> phi_bar, double q_bar, double t);

struct MixedRegression {
  Vector y;
  double delta = 0.0;
  double k = 0.0;
  double det_phi = 0.0;
  bool excited = false;  // false when det φ == 0: Y carries no information
};

/// Y = k·adj(φ)q, Δ = k·det(φ), with k = 1/(det φ + ε_k) clamped to
/// [k_min, k_max]. Non-finite or non-positive raw gains map to k_max.
MixedRegression mix(const DremState& state);
/// Same mixing with an explicit gain; used to check k-invariance of Y/Δ.
MixedRegression mix_with_gain(const DremState& state, double k);
double mixing_gain(double det_phi, const DremConfig& cfg);

struct ExcitationSeries {
  Vector t;
  Vector lambda_min;
};

/// Minimum eigenvalue of the forward-window Gram integral
/// ∫_t^{t+T} φ̄φ̄ᵀ dτ (trapezoid over the samples) at every `stride`-th sample
/// whose window fits in the trace. Throws std::invalid_argument when T <= 0
/// or the window is longer than the trace.
ExcitationSeries excitation_level(std::span<const double> times, const std::vector<Vector>& phi_bar,
                                  double window, std::size_t stride = 1);

/// Pairs (i, j), i < j, of regressor components that coincide over the whole
/// trace within tol·(1 + max|φ_i|) and are not identically zero. A diagnostic
/// for choosing D_η, not a synthesizer.
std::vector<std::pair<std::size_t, std::size_t>> find_regressor_equalities(
    const std::vector<Vector>& phi_e, double tol = 1e-9);

}  // namespace adaptobs
