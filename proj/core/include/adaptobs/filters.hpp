#pragma once

// Input/output filter bank. Everything here is computable from (u, y) alone:
// the six linear filters z, P, Ω, F, H, N, the measurable signal q̄, and the
// extended regressor φ̄_e that satisfy q̄ = φ̄_eᵀη_e(ψ) once transients decay.

#include <span>

#include "adaptobs/matrix.hpp"
#include "adaptobs/plant.hpp"

namespace adaptobs {

struct FilterGains {
  Vector k;
  Vector f;
  Matrix a_k;
  Matrix a_f;
  Matrix o_e;
  Matrix o_e_inv;
  std::size_t order() const { return k.size(); }
};

/// Builds A_K, A_f and O_e. Throws std::invalid_argument when either
/// companion matrix is not Hurwitz or the lengths differ.
FilterGains make_filter_gains(std::span<const double> k, std::span<const double> f);

/// Offsets of each filter inside the flat state buffer. Matrices are stored
/// row-major.
struct FilterLayout {
  std::size_t n = 0;
  std::size_t z() const { return 0; }
  std::size_t p() const { return n; }
  std::size_t omega() const { return n + n * n; }
  std::size_t f() const { return n + 2 * n * n; }
  std::size_t h() const { return 2 * n + 2 * n * n; }
  std::size_t nn() const { return 2 * n + 3 * n * n; }
  std::size_t size() const { return 2 * n + 4 * n * n; }
};

struct FilterState {
  FilterLayout layout;
  Vector data;

  static FilterState zeros(std::size_t n);

  std::span<const double> z() const { return std::span(data).subspan(layout.z(), layout.n); }
  std::span<const double> f_state() const { return std::span(data).subspan(layout.f(), layout.n); }
  Matrix p() const { return block(layout.p()); }
  Matrix omega() const { return block(layout.omega()); }
  Matrix h() const { return block(layout.h()); }
  Matrix n_mat() const { return block(layout.nn()); }

 private:
  Matrix block(std::size_t offset) const;
};

/// d/dt of the flat filter buffer for the given (u, y).
void filter_derivative(const FilterGains& g, double u, double y, std::span<const double> state,
                       std::span<double> out);

/// One RK4 step with (u, y) held over the step. Throws DivergenceError.
void step_filters(FilterState& state, const FilterGains& g, double u, double y, double dt,
                  double t = 0.0);

inline std::size_t extended_dim(std::size_t n) { return 3 * n + 2 * n * n; }

struct ExtendedRegressor {
  double q_bar = 0.0;
  Vector phi_e;
};

/// q̄ = fᵀF + y − C_0ᵀz and
/// φ̄_e = [ΩᵀC_0 + Nᵀf; PᵀC_0 + Hᵀf; F; vec(N); vec(H)].
ExtendedRegressor extended_regressor(const FilterState& state, const FilterGains& g, double y);
/// Allocation-free form over a raw buffer; `phi_e` must have extended_dim(n).
double extended_regressor_into(std::span<const double> state, const FilterGains& g, double y,
                               std::span<double> phi_e);

/// η_e = [ψ_a; ψ_b; Γ; −ψ_a⊗Γ; −ψ_b⊗Γ].
Vector true_eta_e(std::span<const double> psi_a, std::span<const double> psi_b,
                  std::span<const double> gamma);

/// Bottom row Γ of the companion matrix whose spectrum is σ(A_δ) plus
/// n − n_δ zeros.
Vector gamma_spectrum_reference(const LinearExosystem& exo, std::size_t n);

/// Rows (Γ − f)ᵀA_Γ^k, k = 0..n−1, with A_Γ = companion_bottom(Γ).
Matrix o_gamma_matrix(std::span<const double> gamma, std::span<const double> f);

/// ξ = z + Ωψ_a + Pψ_b + O_e⁻¹O_Γ(F − Nψ_a − Hψ_b).
Vector canonical_state_estimate(const FilterState& state, const FilterGains& g,
                                std::span<const double> psi_a, std::span<const double> psi_b,
                                const Matrix& o_gamma);

}  // namespace adaptobs
