#include <gtest/gtest.h>

#include <cmath>

#include "adaptobs/errors.hpp"
#include "adaptobs/scenario.hpp"

using namespace adaptobs;

TEST(Scenario, DefaultsRoundTripThroughJson) {
  Scenario s;
  s.dump_cascade_at = 40.0;
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back.model, "paper-example");
  EXPECT_EQ(back.params.theta, s.params.theta);
  EXPECT_EQ(back.params.seed, s.params.seed);
  EXPECT_EQ(back.options.eps_norm, s.options.eps_norm);
  EXPECT_EQ(back.dump_cascade_at, 40.0);
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
}

TEST(Scenario, PartialFileMergesOverDefaults) {
  const Scenario s = scenario_from_json(R"({"gamma": 10, "control": {"excitation": false}, "observers": "proposed"})");
  EXPECT_EQ(s.params.gamma, 10.0);
  EXPECT_FALSE(s.params.excitation);
  EXPECT_EQ(s.params.setpoint, 100.0);
  EXPECT_EQ(s.observers, ObserverSelection::Proposed);
  EXPECT_TRUE(std::isnan(s.dump_cascade_at));
}

TEST(Scenario, UnknownKeysAndBadTypesAreReported) {
  try {
    scenario_from_json(R"({"gama": 1, "control": {"gian": 2}, "theta": "x"})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.fields().size(), 3u);
  }
  EXPECT_THROW(scenario_from_json("{not json"), ConfigError);
  EXPECT_THROW(scenario_from_json("[1, 2]"), ConfigError);
}

TEST(Scenario, ValidationCollectsFields) {
  Scenario s;
  s.params.dt = 3e-4;  // 25 is not a multiple
  s.decimation = 0;
  s.model = "unknown";
  try {
    s.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.fields().size(), 3u);
  }
}

TEST(Scenario, OverridesParseJsonValues) {
  Scenario s;
  apply_override(s, "gamma=2.5");
  apply_override(s, "theta=[2, 1, -1]");
  apply_override(s, "control.excitation=false");
  apply_override(s, "pipeline.eps_norm=0.01");
  apply_override(s, "observers=baseline");
  apply_override(s, "seed=7");
  EXPECT_EQ(s.params.gamma, 2.5);
  EXPECT_EQ(s.params.theta, (Vector{2, 1, -1}));
  EXPECT_FALSE(s.params.excitation);
  EXPECT_EQ(s.options.eps_norm, 0.01);
  EXPECT_EQ(s.observers, ObserverSelection::Baseline);
  EXPECT_EQ(s.params.seed, 7u);
  EXPECT_THROW(apply_override(s, "nokey"), ConfigError);
  EXPECT_THROW(apply_override(s, "bogus.key=1"), ConfigError);
}

TEST(Scenario, ObserverSelectionNames) {
  for (auto s : {ObserverSelection::Proposed, ObserverSelection::Baseline, ObserverSelection::Both})
    EXPECT_EQ(parse_observers(to_string(s)), s);
  EXPECT_THROW(parse_observers("all"), ConfigError);
}
