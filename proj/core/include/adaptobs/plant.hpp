#pragma once

// Uncertain SISO plant  x' = A(θ)x + B(θ)u + D(θ)δ,  y = Cᵀx,  driven by an
// autonomous disturbance generator  x_δ' = A_δ(ρ)x_δ,  δ = h_δᵀx_δ.
//
// The observer never sees θ or ρ. This module is the simulation ground truth
// and the canonical-form bookkeeping used to score the observer.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "adaptobs/integrator.hpp"
#include "adaptobs/matrix.hpp"

namespace adaptobs {

class NotObservableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearPlant {
  Matrix a;
  Vector b;
  Vector d;
  Vector c;
  std::size_t order() const { return a.rows(); }
};

struct PlantModel {
  std::size_t n = 0;
  std::size_t n_theta = 0;
  Vector theta;
  std::function<Matrix(const Vector&)> a;
  std::function<Vector(const Vector&)> b;
  std::function<Vector(const Vector&)> d;
  Vector c;
  Vector x0;

  /// Evaluates the matrix maps at the configured θ and checks dimensions.
  LinearPlant evaluate() const;
};

struct LinearExosystem {
  Matrix a;
  Vector h;
  std::size_t order() const { return a.rows(); }
};

struct Exosystem {
  std::size_t n_delta = 0;
  Vector rho;
  std::function<Matrix(const Vector&)> a_delta;
  Vector h;
  Vector x0;

  LinearExosystem evaluate() const;
};

/// Observer canonical form  ξ' = A_0ξ + ψ_a y + ψ_b u + e_n ψ_d δ,  y = C_0ᵀξ,
/// reached through ξ = T x with T = T_I⁻¹.
struct CanonicalForm {
  Matrix a0;
  Vector c0;
  Vector psi_a;
  Vector psi_b;
  double psi_d = 0.0;
  Matrix t;
  Matrix t_i;
  Vector o_n;
};

/// Throws NotObservableError when the observability matrix of (Cᵀ, A) is
/// singular at the configured θ.
CanonicalForm build_canonical(const LinearPlant& plant);
CanonicalForm build_canonical(const PlantModel& model);

/// Upper shift matrix A_0 of order n.
Matrix shift_matrix(std::size_t n);

/// Disturbance relative degree equals n: CᵀA^kD = 0 for k <= n-2 and
/// CᵀA^{n-1}D != 0. Returns the Markov parameters CᵀA^kD, k = 0..n-1.
Vector disturbance_markov_parameters(const LinearPlant& plant);
bool has_full_disturbance_relative_degree(const LinearPlant& plant, double tol = 1e-12);

/// All eigenvalues of A_δ on the imaginary axis within `tol`.
bool exosystem_is_marginal(const LinearExosystem& exo, double tol = 1e-6);

struct PlantState {
  Vector x;
  Vector x_delta;
  double t = 0.0;
};

struct PlantOutputs {
  double y = 0.0;
  double delta = 0.0;
};

PlantState initial_state(const PlantModel& model, const Exosystem& exo);

/// d/dt of the stacked [x; x_δ] with u held constant.
void plant_derivative(const LinearPlant& plant, const LinearExosystem& exo, double u,
                      std::span<const double> state, std::span<double> out);

double plant_output(const LinearPlant& plant, std::span<const double> x);
double disturbance_output(const LinearExosystem& exo, std::span<const double> x_delta);

/// One RK4 step under zero-order-hold u. Throws DivergenceError on NaN/Inf.
PlantOutputs step_plant(const LinearPlant& plant, const LinearExosystem& exo, PlantState& state,
                        double u, double dt);

/// ξ = T x, the canonical state a perfect observer would track.
Vector virtual_state(const CanonicalForm& cf, std::span<const double> x);

}  // namespace adaptobs
