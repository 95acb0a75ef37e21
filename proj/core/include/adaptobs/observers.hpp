#pragma once

// The proposed adaptive observer (gradient flow on the scalar-regressor
// regression for κ plus division-free state reconstruction) and the
// certainty-equivalence baseline it is compared against.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adaptobs/filters.hpp"
#include "adaptobs/matrix.hpp"

namespace adaptobs {

/// κ = [ψ_a; ψ_b; Γ; vec(O_Γ); vec(T_I)], vec column-major.
struct KappaLayout {
  std::size_t n = 0;
  std::size_t size() const { return 3 * n + 2 * n * n; }
  std::size_t psi_a() const { return 0; }
  std::size_t psi_b() const { return n; }
  std::size_t gamma() const { return 2 * n; }
  std::size_t o_gamma() const { return 3 * n; }
  std::size_t t_i() const { return 3 * n + n * n; }
};

Vector pack_kappa(std::span<const double> psi, const Matrix& o_gamma, const Matrix& t_i);

struct ObserverState {
  KappaLayout layout;
  Vector kappa_hat;
  double gamma = 1.0;

  static ObserverState make(std::size_t n, Vector kappa0, double gamma);

  std::span<const double> psi() const { return std::span(kappa_hat).first(3 * layout.n); }
  std::span<const double> psi_a() const { return std::span(kappa_hat).subspan(layout.psi_a(), layout.n); }
  std::span<const double> psi_b() const { return std::span(kappa_hat).subspan(layout.psi_b(), layout.n); }
  std::span<const double> gamma_vec() const { return std::span(kappa_hat).subspan(layout.gamma(), layout.n); }
  Matrix o_gamma() const;
  Matrix t_i() const;
};

/// Exact solution over dt of κ̂' = −γm(mκ̂ − y) with (y, m) frozen:
/// κ̂ ← e^{−γm²dt}κ̂ + (1 − e^{−γm²dt})/m · y. Unconditionally stable.
/// Throws DivergenceError if κ̂ turns non-finite.
void step_adaptive(ObserverState& obs, std::span<const double> y, double m, double dt, double t = 0.0);

struct Reconstruction {
  Vector xi;
  Vector x;
};

/// ξ̂ = O_e⁻¹Ô_Γ(F − Nψ̂_a − Hψ̂_b) + z + Ωψ̂_a + Pψ̂_b and x̂ = T̂_Iξ̂.
/// Uses only κ̂ blocks and filter states: no inversion of anything estimated.
Reconstruction reconstruct(const ObserverState& obs, const FilterState& filters, const FilterGains& g);
/// Same over a raw filter buffer; xi and x must have length n.
void reconstruct_into(const ObserverState& obs, std::span<const double> filters,
                      const FilterGains& g, std::span<double> xi, std::span<double> x);

/// T̃_Iξ̃ + T_Iξ̃ + T̃_Iξ for the given estimates and truth.
Vector error_decomposition(const Matrix& t_i_hat, std::span<const double> xi_hat, const Matrix& t_i,
                           std::span<const double> xi);

struct Denominator {
  std::string name;
  double value = 0.0;
};

struct GuardedValue {
  Vector value;
  std::vector<Denominator> denominators;
};

/// Model-supplied inverse maps the certainty-equivalence observer divides
/// through.
struct BaselineMaps {
  std::function<GuardedValue(const Vector& eta)> f_psi;        // η → ψ
  std::function<GuardedValue(const Vector& psi_ab)> f_theta;   // ψ_ab → θ
  std::function<GuardedValue(const Vector& theta)> t_i;        // θ → vec(T_I)
  std::function<Matrix(const Vector& gamma)> o_gamma;          // Γ → O_Γ
  Matrix l_ab;
  Matrix l_gamma;
};

struct SingularityEvent {
  double t = 0.0;
  std::string observer;
  std::string denominator;
  double value = 0.0;
  std::string kind;  // "guard": |den| < eps_div; "crossing": sign change between steps
};

struct BaselineState {
  std::size_t n = 0;
  Vector eta_hat;
  double gamma = 1.0;
  double eps_div = 1e-8;
  bool have_maps = false;
  Vector psi_hat;
  Vector theta_hat;
  Matrix t_i_hat;
  Matrix o_gamma_hat;
  std::vector<Denominator> last_denominators;

  static BaselineState make(std::size_t n, Vector eta0, double gamma, double eps_div);
};

/// Gradient step on η̂ with the (normalized) DREM pair, then ψ̂, θ̂, T_I(θ̂)
/// and O_Γ(Γ̂) through the inverse maps. A guard hit holds the previous maps
/// and logs an event; sign changes of a denominator are logged as crossings.
/// Returns the certainty-equivalence state estimate (zeros until the first
/// successful map evaluation).
Reconstruction step_baseline(BaselineState& bl, const BaselineMaps& maps, std::span<const double> y,
                             double delta, std::span<const double> filters, const FilterGains& g,
                             double dt, double t, std::vector<SingularityEvent>& events);

struct DecayFit {
  double rate = 0.0;  // slope of log‖·‖; negative for decay
  double intercept = 0.0;
  double r2 = 0.0;
  double residual = 0.0;  // RMS of the log residual
  std::size_t samples = 0;
};

/// Least-squares line through log(values) for t in [t0, t1], truncated at the
/// first sample that is not positive and finite.
DecayFit fit_decay(std::span<const double> t, std::span<const double> values, double t0, double t1);

}  // namespace adaptobs
