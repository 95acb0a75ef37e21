#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "adaptobs/errors.hpp"
#include "adaptobs/example_system.hpp"
#include "adaptobs/model.hpp"

using namespace adaptobs;

TEST(ExampleConfig, DefaultsAreValid) { EXPECT_NO_THROW(ExampleConfig{}.validate()); }

TEST(ExampleConfig, ValidationListsEveryBadField) {
  ExampleConfig cfg;
  cfg.theta = {1.0, 0.0, 0.0};
  cfg.dt = 0.0;
  cfg.t_end = 10.0;
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.fields().size(), 4u);
    const auto has = [&](const std::string& key) {
      return std::any_of(e.fields().begin(), e.fields().end(),
                         [&](const std::string& f) { return f.rfind(key, 0) == 0; });
    };
    EXPECT_TRUE(has("theta[2]"));
    EXPECT_TRUE(has("theta[3]"));
    EXPECT_TRUE(has("dt"));
    EXPECT_TRUE(has("t_end"));
  }
}

TEST(ExampleSystem, ClosedFormsAtWorkedParameters) {
  EXPECT_EQ(example_psi(Vector{1, 1, -1}, -10), (Vector{0, -1, 0, -1, 0, -2, 0, -10, 0}));
  EXPECT_EQ(example_psi_d(Vector{1, 1, -1}), -1.0);
  EXPECT_EQ(example_eta(Vector{1, 1, -1}, -10), (Vector{-11, -1, -12, -10, -20}));
  EXPECT_EQ(example_t_i(Vector{1, 1, -1}), (Matrix{{2, 0, -1}, {0, 1, 0}, {1, 0, 0}}));
  EXPECT_EQ(example_o_gamma(-10, Vector{-125, -75, -15}), (Matrix{{125, 65, 15}, {0, -25, 65}, {0, -650, -25}}));
}

TEST(ExampleSystem, ControlSwitchesInjectionOnAtTEps) {
  ExampleConfig cfg;
  const double y = 3.0;
  EXPECT_DOUBLE_EQ(example_control(10.0, y, cfg), -75.0 * (100.0 - y));
  // Heaviside with h(0) = 1: injection active exactly at t_ε.
  const double t = cfg.t_eps;
  EXPECT_DOUBLE_EQ(example_control(t, y, cfg), -75.0 * (2.5 * std::sin(10.0 * t) + 100.0 - y));
  cfg.excitation = false;
  EXPECT_DOUBLE_EQ(example_control(t, y, cfg), -75.0 * (100.0 - y));
}

TEST(ModelRegistry, WorkedExampleIsRegistered) {
  auto& reg = ModelRegistry::instance();
  EXPECT_TRUE(reg.contains(kPaperExample));
  EXPECT_THROW(reg.create("no-such-model", ExampleConfig{}), ConfigError);
  const ModelInstance m = reg.create(kPaperExample, ExampleConfig{});
  EXPECT_EQ(m.name, "paper-example");
  EXPECT_EQ(m.true_eta, (Vector{-11, -1, -12, -10, -20}));
  EXPECT_EQ(m.true_kappa.size(), 27u);
  EXPECT_EQ(m.reduction.l_eta * m.true_eta_e, m.true_eta);
}

TEST(ModelRegistry, CustomModelsCanBeAdded) {
  auto& reg = ModelRegistry::instance();
  reg.add("paper-example-fast-filters", [](const ExampleConfig& cfg) {
    ExampleConfig c = cfg;
    c.k = {6, 12, 8};  // (s + 2)³
    return make_paper_example(c);
  });
  EXPECT_TRUE(reg.contains("paper-example-fast-filters"));
  const ModelInstance m = reg.create("paper-example-fast-filters", ExampleConfig{});
  EXPECT_EQ(m.gains.k, (Vector{6, 12, 8}));
}

TEST(ModelRegistry, BadFilterGainsAreConfigErrors) {
  ExampleConfig cfg;
  cfg.f = {125, 75, 15};
  EXPECT_THROW(make_paper_example(cfg), ConfigError);
}

TEST(ModelChecks, AllPassForWorkedExample) {
  const auto checks = check_model(make_paper_example(ExampleConfig{}));
  EXPECT_GE(checks.size(), 14u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(ModelChecks, HoldAwayFromWorkedParameters) {
  ExampleConfig cfg;
  cfg.theta = {0.8, -1.7, 2.2};
  cfg.rho = -3.0;
  for (const auto& c : check_model(make_paper_example(cfg), 3)) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
