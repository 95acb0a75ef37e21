#pragma once

// Heterogeneous mappings and the regression cascade that turns the mixed
// regression Y = Δη into a single scalar-regressor regression Y_κ = M_κκ for
// κ = [ψ; vec(O_Γ); vec(T_I)] without dividing by anything.
//
// The raw cascade multiplies determinants of determinants: for the worked
// example M_κ is a 369th power of the DREM regressor, far outside double
// range. Each stage pair therefore carries a positive gauge factor. A pair
// (Y, M) with Y = M·p stays valid under any positive rescaling, and every
// stage is homogeneous in its input pair, so the cascade runs on rescaled
// pairs and keeps the true magnitude as a log scale on the side.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "adaptobs/matrix.hpp"

namespace adaptobs {

/// Π_F(ω)F(x) = T_F(Ξ_F(ω)x) with Ξ_F(ω) = Ξ̄_F(ω)ω.
/// `transformed(ω, Y)` evaluates T_F(Ξ̄_F(ω)Y) for a measured Y = ωx.
struct HeteroMapping {
  std::string name;
  int degree = 1;  // ℓ_F: det Π_F(ω) >= ω^ℓ_F
  std::size_t arg_dim = 0;
  std::function<Matrix(const Vector& x)> reference;
  std::function<Matrix(double omega)> pi;
  std::function<Matrix(double omega, const Vector& y)> transformed;
};

struct HeteroCheck {
  std::size_t draws = 0;
  double max_rel_error = 0.0;
  bool det_bound_holds = true;
};

/// Scaling identity Π(ω)F(x) = T(Ξ(ω)x) over random ω ∈ [omega_lo, omega_hi], x ∈ [−x_abs, x_abs].
/// Relative error is ‖ΠF − T‖_max / (1 + ‖ΠF‖_max).
HeteroCheck check_heterogeneity(const HeteroMapping& m, std::mt19937_64& rng, std::size_t draws,
                                double omega_lo = 0.5, double omega_hi = 2.0, double x_abs = 2.0);

/// Model-supplied measurable mappings for the four cascade stages. Every
/// stage output must be a homogeneous polynomial of the stated degree in its
/// input pair; the gauge bookkeeping relies on it.
struct CascadeBundle {
  std::size_t n = 0;
  std::size_t n_eta = 0;
  std::size_t n_theta = 0;

  // ψ stage, input (Y, Δ).
  std::function<Matrix(double delta, const Vector& y)> t_g_psi;
  std::function<Vector(double delta, const Vector& y)> t_s_psi;
  int degree_psi = 1;
  // O_Γ stage, input (L_ΓY_ψ, M_ψ).
  std::function<Matrix(double m_psi, const Vector& y_gamma)> t_o_gamma;
  std::function<Matrix(double m_psi)> pi_o_gamma;
  int degree_o_gamma = 1;
  // θ stage, input (L_abY_ψ, M_ψ).
  std::function<Matrix(double m_psi, const Vector& y_ab)> t_g_theta;
  std::function<Vector(double m_psi, const Vector& y_ab)> t_s_theta;
  int degree_theta = 1;
  // T_I stage, input (Y_θ, M_θ).
  std::function<Matrix(double m_theta, const Vector& y_theta)> t_p;
  std::function<Matrix(double m_theta, const Vector& y_theta)> t_q;
  int degree_ti = 1;

  Matrix l_gamma;  // n × 3n, picks Γ out of ψ
  Matrix l_ab;     // n_θ × 3n, picks ψ_ab out of ψ

  /// Reference F / Π / T triples for the heterogeneity contract.
  std::vector<HeteroMapping> mappings;

  std::size_t kappa_dim() const { return 3 * n + 2 * n * n; }
};

/// Stage pair with a vector regressand: true values are (y, m)·e^{log_scale}.
struct StageVector {
  Vector y;
  double m = 0.0;
  double log_scale = 0.0;
};

struct StageMatrix {
  Matrix y;
  double m = 0.0;
  double log_scale = 0.0;
};

/// Divides (y, m) by max(|m|, ‖y‖_∞) and records the factor. No-op on a zero
/// or non-finite pair.
void normalize_gauge(StageVector& s);
void normalize_gauge(StageMatrix& s);

StageVector stage_psi(const Vector& y, double delta, const CascadeBundle& b, double log_scale = 0.0);
StageMatrix stage_ogamma(const StageVector& psi, const CascadeBundle& b);
StageVector stage_theta(const StageVector& psi, const CascadeBundle& b);
StageMatrix stage_ti(const StageVector& theta, const CascadeBundle& b);

/// Y_κ = M_κκ in factored form. With a, b, c the stage regressors of ψ, O_Γ
/// and T_I, the block-diagonal adjugate leaves
///   Y_κ = g·[bc·Y_ψ; ac·vec(Y_OΓ); ab·vec(Y_TI)],  M_κ = g·abc,
/// with g = a^{3n−1}b^{n²−1}c^{n²−1}. `y` and `m` hold the bracket and abc
/// (gauge-scaled); the true M_κ is sign_m_kappa·exp(log_abs_m_kappa).
struct KappaRegression {
  Vector y;
  double m = 0.0;
  double log_abs_m_kappa = -std::numeric_limits<double>::infinity();
  int sign_m_kappa = 0;
};

KappaRegression stack_kappa(const StageVector& psi, const StageMatrix& o_gamma,
                            const StageMatrix& t_i, std::size_t n);

/// Literal block-diagonal construction without factoring. Only usable when
/// the powers stay inside double range; kept as a test oracle.
struct RawKappa {
  Vector y;
  double m = 0.0;
};
RawKappa stack_kappa_direct(const StageVector& psi, const StageMatrix& o_gamma,
                            const StageMatrix& t_i, std::size_t n);

struct CascadeOutput {
  StageVector psi;
  StageMatrix o_gamma;
  StageVector theta;
  StageMatrix t_i;
  KappaRegression kappa;
};

struct CascadeOptions {
  bool gauge = true;
};

CascadeOutput run_cascade(const Vector& y, double delta, const CascadeBundle& b,
                          const CascadeOptions& opt = {});

struct NormalizedRegression {
  Vector y;
  double m = 0.0;
};

/// (y, m) / (|m| + eps·‖y‖). Preserves y/m and sign(m); bounds m² by 1 and
/// makes it 1/(1 + eps‖κ‖)² on the regression manifold. Zero pair maps to
/// zero.
NormalizedRegression normalize_regression(const KappaRegression& k, double eps);

}  // namespace adaptobs
