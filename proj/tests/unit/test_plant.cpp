#include <gtest/gtest.h>

#include <cmath>

#include "adaptobs/example_system.hpp"
#include "adaptobs/plant.hpp"

using namespace adaptobs;

namespace {

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_NEAR(a(i, j), b(i, j), tol) << i << "," << j;
}

void expect_vector_near(std::span<const double> a, std::span<const double> b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << i;
}

LinearPlant worked_plant() { return example_plant(ExampleConfig{}).evaluate(); }

}  // namespace

TEST(Plant, WorkedExampleMatrices) {
  const LinearPlant p = worked_plant();
  EXPECT_EQ(p.a, (Matrix{{0, 2, 0}, {-1, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(p.b, (Vector{0, 0, -1}));
  EXPECT_EQ(p.d, (Vector{1, 0, 0}));
  EXPECT_EQ(p.c, (Vector{0, 0, 1}));
}

TEST(Plant, CanonicalFormOfWorkedExample) {
  // Hand-derived: ψ_a = [0, −1, 0], ψ_b = [−1, 0, −2], ψ_d = θ₁θ₂²θ₃ = −1.
  const CanonicalForm cf = build_canonical(worked_plant());
  expect_vector_near(cf.psi_a, Vector{0, -1, 0}, 1e-12);
  expect_vector_near(cf.psi_b, Vector{-1, 0, -2}, 1e-12);
  EXPECT_NEAR(cf.psi_d, -1.0, 1e-12);
  expect_matrix_near(cf.t_i, Matrix{{2, 0, -1}, {0, 1, 0}, {1, 0, 0}}, 1e-12);
  expect_matrix_near(cf.t * cf.t_i, Matrix::identity(3), 1e-12);
  EXPECT_EQ(cf.a0, shift_matrix(3));
}

TEST(Plant, CanonicalSimilarityHolds) {
  // T A T_I = A_0 + ψ_a C_0ᵀ and Cᵀ T_I = C_0ᵀ for random observable θ.
  for (const Vector theta : {Vector{1, 1, -1}, Vector{0.7, -1.3, 2.1}, Vector{-2, 0.5, 0.9}}) {
    ExampleConfig cfg;
    cfg.theta = theta;
    const LinearPlant p = example_plant(cfg).evaluate();
    const CanonicalForm cf = build_canonical(p);
    Matrix expected = cf.a0;
    for (std::size_t i = 0; i < 3; ++i) expected(i, 0) += cf.psi_a[i];
    expect_matrix_near(cf.t * p.a * cf.t_i, expected, 1e-10);
    expect_vector_near(left_multiply(p.c, cf.t_i), cf.c0, 1e-12);
    expect_vector_near(cf.psi_b, cf.t * p.b, 1e-12);
    // closed forms agree
    const Vector psi = example_psi(theta, cfg.rho);
    expect_vector_near(cf.psi_a, std::span(psi).first(3), 1e-10);
    expect_vector_near(cf.psi_b, std::span(psi).subspan(3, 3), 1e-10);
    expect_matrix_near(cf.t_i, example_t_i(theta), 1e-10);
  }
}

TEST(Plant, AlreadyCanonicalPlantHasIdentityTransform) {
  LinearPlant p;
  p.a = Matrix{{-1, 1, 0}, {2, 0, 1}, {-3, 0, 0}};
  p.b = {1, 2, 3};
  p.d = {0, 0, 1};
  p.c = {1, 0, 0};
  const CanonicalForm cf = build_canonical(p);
  expect_matrix_near(cf.t_i, Matrix::identity(3), 1e-12);
  expect_vector_near(cf.psi_a, Vector{-1, 2, -3}, 1e-12);
  expect_vector_near(cf.psi_b, p.b, 1e-12);
}

TEST(Plant, UnobservableParametersAreRejected) {
  ExampleConfig cfg;
  cfg.theta = {1.0, 0.0, -1.0};
  EXPECT_THROW(build_canonical(example_plant(cfg)), NotObservableError);
}

TEST(Plant, DisturbanceRelativeDegree) {
  const LinearPlant p = worked_plant();
  expect_vector_near(disturbance_markov_parameters(p), Vector{0, 0, -1}, 1e-12);
  EXPECT_TRUE(has_full_disturbance_relative_degree(p));
  LinearPlant q = p;
  q.d = {0, 0, 1};  // enters at the output: relative degree 1
  EXPECT_FALSE(has_full_disturbance_relative_degree(q));
}

TEST(Plant, ExosystemMarginality) {
  const LinearExosystem exo = example_exosystem(ExampleConfig{}).evaluate();
  EXPECT_EQ(exo.a, (Matrix{{0, 1}, {-10, 0}}));
  EXPECT_TRUE(exosystem_is_marginal(exo));
  LinearExosystem unstable{Matrix{{0, 1}, {10, 0}}, {1, 0}};
  EXPECT_FALSE(exosystem_is_marginal(unstable));
}

TEST(Plant, ExosystemProducesHarmonicDisturbance) {
  const ExampleConfig cfg;
  const LinearPlant p = worked_plant();
  const LinearExosystem exo = example_exosystem(cfg).evaluate();
  PlantState s = initial_state(example_plant(cfg), example_exosystem(cfg));
  PlantOutputs out;
  for (int i = 0; i < 10000; ++i) out = step_plant(p, exo, s, 0.0, 1e-4);
  EXPECT_NEAR(s.t, 1.0, 1e-12);
  EXPECT_NEAR(out.delta, std::cos(std::sqrt(10.0)), 1e-10);
}

TEST(Plant, ZeroInputZeroStateStaysZero) {
  const LinearPlant p = worked_plant();
  const LinearExosystem exo{Matrix{{0, 1}, {-10, 0}}, {1, 0}};
  PlantState s{{0, 0, 0}, {0, 0}, 0.0};
  for (int i = 0; i < 100; ++i) step_plant(p, exo, s, 0.0, 1e-3);
  EXPECT_EQ(s.x, (Vector{0, 0, 0}));
}

TEST(Plant, VirtualStateFollowsCanonicalDynamics) {
  // With u = 0 and no disturbance, ξ = T x obeys ξ' = (A_0 + ψ_aC_0ᵀ)ξ.
  const LinearPlant p = worked_plant();
  const CanonicalForm cf = build_canonical(p);
  const Vector x{1, -1, 2};
  const Vector xi = virtual_state(cf, x);
  const Vector lhs = cf.t * (p.a * x);
  Matrix acan = cf.a0;
  for (std::size_t i = 0; i < 3; ++i) acan(i, 0) += cf.psi_a[i];
  expect_vector_near(lhs, acan * xi, 1e-12);
}
