#include <gtest/gtest.h>

#include <cmath>

#include "adaptobs/example_system.hpp"
#include "adaptobs/filters.hpp"
#include "adaptobs/integrator.hpp"

using namespace adaptobs;

namespace {

FilterGains worked_gains() { return make_filter_gains(Vector{3, 3, 1}, Vector{-125, -75, -15}); }

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_NEAR(a(i, j), b(i, j), tol) << i << "," << j;
}

}  // namespace

TEST(FilterGains, CompanionMatricesAndObservability) {
  const FilterGains g = worked_gains();
  EXPECT_EQ(g.a_k, (Matrix{{-3, 1, 0}, {-3, 0, 1}, {-1, 0, 0}}));
  EXPECT_EQ(g.a_f, (Matrix{{0, 1, 0}, {0, 0, 1}, {-125, -75, -15}}));
  expect_matrix_near(g.o_e * g.o_e_inv, Matrix::identity(3), 1e-14);
}

TEST(FilterGains, RejectsNonHurwitz) {
  EXPECT_THROW(make_filter_gains(Vector{-3, 3, 1}, Vector{-125, -75, -15}), std::invalid_argument);
  EXPECT_THROW(make_filter_gains(Vector{3, 3, 1}, Vector{125, -75, -15}), std::invalid_argument);
  EXPECT_THROW(make_filter_gains(Vector{3, 3}, Vector{-125, -75, -15}), std::invalid_argument);
}

TEST(Filters, ZeroInputsKeepZeroState) {
  const FilterGains g = worked_gains();
  FilterState s = FilterState::zeros(3);
  for (int i = 0; i < 100; ++i) step_filters(s, g, 0.0, 0.0, 1e-3);
  for (double v : s.data) EXPECT_EQ(v, 0.0);
}

TEST(Filters, ConstantOutputSteadyState) {
  // z → −A_K⁻¹K = [1, 0, 0] for K = [3, 3, 1].
  const FilterGains g = worked_gains();
  FilterState s = FilterState::zeros(3);
  for (int i = 0; i < 20000; ++i) step_filters(s, g, 0.0, 1.0, 1e-3);
  const auto z = s.z();
  EXPECT_NEAR(z[0], 1.0, 1e-6);
  EXPECT_NEAR(z[1], 0.0, 1e-6);
  EXPECT_NEAR(z[2], 0.0, 1e-6);
}

TEST(Filters, ConstantInputDrivesPToMinusAkInverse) {
  const FilterGains g = worked_gains();
  FilterState s = FilterState::zeros(3);
  for (int i = 0; i < 30000; ++i) step_filters(s, g, 1.0, 0.0, 1e-3);
  // −A_K⁻¹ worked out by hand.
  expect_matrix_near(s.p(), Matrix{{0, 0, 1}, {-1, 0, 3}, {0, -1, 3}}, 1e-6);
}

TEST(Filters, Superposition) {
  const FilterGains g = worked_gains();
  FilterState a = FilterState::zeros(3);
  FilterState b = FilterState::zeros(3);
  for (int i = 0; i < 2000; ++i) {
    const double t = i * 1e-3;
    step_filters(a, g, std::sin(3 * t), std::cos(t), 1e-3);
    step_filters(b, g, 2 * std::sin(3 * t), 2 * std::cos(t), 1e-3);
  }
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(b.data[i], 2 * a.data[i], 1e-12);
}

TEST(ExtendedRegressor, TrivialStates) {
  const FilterGains g = worked_gains();
  const FilterState s = FilterState::zeros(3);
  auto r = extended_regressor(s, g, 0.0);
  EXPECT_EQ(r.q_bar, 0.0);
  EXPECT_EQ(r.phi_e.size(), 27u);
  for (double v : r.phi_e) EXPECT_EQ(v, 0.0);
  r = extended_regressor(s, g, 3.0);
  EXPECT_EQ(r.q_bar, 3.0);
  for (double v : r.phi_e) EXPECT_EQ(v, 0.0);
}

TEST(ExtendedRegressor, RawBufferMatchesStructuredForm) {
  const FilterGains g = worked_gains();
  FilterState s = FilterState::zeros(3);
  for (int i = 0; i < 500; ++i) step_filters(s, g, std::sin(i * 0.01), std::cos(i * 0.02), 1e-2);
  const auto r = extended_regressor(s, g, 0.3);
  Vector phi(27);
  const double q = extended_regressor_into(s.data, g, 0.3, phi);
  EXPECT_EQ(q, r.q_bar);
  EXPECT_EQ(phi, r.phi_e);
}

TEST(TrueEtaE, KroneckerBlocks) {
  const Vector zero(3, 0.0);
  for (double v : true_eta_e(zero, zero, zero)) EXPECT_EQ(v, 0.0);
  const Vector e = true_eta_e(Vector{0, -1, 0}, Vector{-1, 0, -2}, Vector{0, -10, 0});
  ASSERT_EQ(e.size(), 27u);
  // −ψ_a ⊗ Γ has −(−1)(−10) = −10 at 1-based position (2−1)·3+2 of its block.
  EXPECT_EQ(e[9 + 4], -10.0);
  for (std::size_t i = 9; i < 18; ++i)
    if (i != 13) EXPECT_EQ(e[i], 0.0);
  const Vector g0 = true_eta_e(Vector{1, 2, 3}, Vector{4, 5, 6}, zero);
  for (std::size_t i = 6; i < 27; ++i) EXPECT_EQ(g0[i], 0.0);
}

TEST(GammaSpectrum, ReferenceExosystems) {
  const LinearExosystem osc{Matrix{{0, 1}, {-10, 0}}, {1, 0}};
  EXPECT_EQ(gamma_spectrum_reference(osc, 3), (Vector{0, -10, 0}));
  // (s² + 4)·s = s³ + 4s, so Γ = [0, −4, 0].
  const LinearExosystem slow{Matrix{{0, 1}, {-4, 0}}, {1, 0}};
  EXPECT_EQ(gamma_spectrum_reference(slow, 3), (Vector{0, -4, 0}));
  const LinearExosystem comp{companion_bottom(Vector{-6, -11, -6}), {1, 0, 0}};
  const Vector g = gamma_spectrum_reference(comp, 3);
  EXPECT_NEAR(g[0], -6, 1e-9);
  EXPECT_NEAR(g[1], -11, 1e-9);
  EXPECT_NEAR(g[2], -6, 1e-9);
  EXPECT_THROW(gamma_spectrum_reference(comp, 2), DimensionError);
}

TEST(OGamma, WorkedExampleValues) {
  const Matrix og = o_gamma_matrix(Vector{0, -10, 0}, Vector{-125, -75, -15});
  expect_matrix_near(og, Matrix{{125, 65, 15}, {0, -25, 65}, {0, -650, -25}}, 1e-12);
  expect_matrix_near(og, example_o_gamma(-10, Vector{-125, -75, -15}), 1e-12);
}

// Closed-loop worked example: plant and filters integrated as one system so
// that the filters see the same y as the plant inside every RK4 stage. The
// measurable identity q̄ = φ̄_eᵀη_e, the structural regressor equalities and
// the filter-based canonical state then hold once the transients have decayed.
TEST(Filters, MeasurableIdentitiesAlongWorkedTrajectory) {
  ExampleConfig cfg;
  const LinearPlant p = example_plant(cfg).evaluate();
  const LinearExosystem exo = example_exosystem(cfg).evaluate();
  const CanonicalForm cf = build_canonical(p);
  const FilterGains g = worked_gains();
  const Vector psi = example_psi(cfg.theta, cfg.rho);
  const Vector eta_e = true_eta_e(std::span(psi).first(3), std::span(psi).subspan(3, 3), std::span(psi).subspan(6, 3));
  const Matrix og = example_o_gamma(cfg.rho, cfg.f);

  const PlantState ps0 = initial_state(example_plant(cfg), example_exosystem(cfg));
  FilterState fs = FilterState::zeros(3);
  Vector state = concat({ps0.x, ps0.x_delta, fs.data});
  const std::size_t nx = ps0.x.size(), np = nx + ps0.x_delta.size();
  double u = 0.0;
  auto deriv = [&](std::span<const double> in, std::span<double> out) {
    plant_derivative(p, exo, u, in.first(np), out.first(np));
    filter_derivative(g, u, plant_output(p, in.first(nx)), in.subspan(np), out.subspan(np));
  };
  Rk4Workspace ws;
  const double dt = 1e-3;
  double max_resid = 0.0, max_eq = 0.0, max_xi = 0.0;
  for (int k = 0; k < 30000; ++k) {
    const double t = k * dt;
    u = example_control(t, plant_output(p, std::span(state).first(nx)), cfg);
    rk4_step(std::span<double>(state), dt, deriv, ws);
    if (t + dt < 25.0) continue;
    std::copy(state.begin() + np, state.end(), fs.data.begin());
    const auto x = std::span<const double>(state).first(nx);
    const auto r = extended_regressor(fs, g, plant_output(p, x));
    max_resid = std::max(max_resid, std::abs(r.q_bar - dot(r.phi_e, eta_e)));
    max_eq = std::max({max_eq, std::abs(r.phi_e[1] - r.phi_e[7]), std::abs(r.phi_e[5] - r.phi_e[19])});
    const Vector xi = canonical_state_estimate(fs, g, std::span(psi).first(3), std::span(psi).subspan(3, 3), og);
    max_xi = std::max(max_xi, norm(sub(xi, virtual_state(cf, Vector(x.begin(), x.end())))));
  }
  EXPECT_LT(max_resid, 1e-6);
  EXPECT_LT(max_eq, 1e-9);
  EXPECT_LT(max_xi, 1e-6);
}
