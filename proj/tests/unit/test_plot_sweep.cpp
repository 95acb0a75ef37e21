#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adaptobs/errors.hpp"
#include "adaptobs/pipeline.hpp"
#include "adaptobs/plot.hpp"
#include "adaptobs/sweep.hpp"

using namespace adaptobs;
namespace fs = std::filesystem;

namespace {

std::string tmp_dir(const std::string& name) {
  const auto dir = fs::path(ADAPTOBS_TEST_TMPDIR) / "plot_sweep" / name;
  fs::remove_all(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Trace file without the scenario header line, which records output_dir.
std::string trace_body(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# scenario", 0) != 0) out += line + '\n';
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

Scenario short_scenario(const std::string& dir) {
  Scenario s;
  s.params.dt = 1e-3;
  s.params.t_end = 26.0;
  s.decimation = 20;
  s.output_dir = dir;
  return s;
}

}  // namespace

TEST(Plot, RenderSvgSkipsNonFinite) {
  Panel p{"demo", "v", true, {Series{"a", {0, 1, 2, 3}, {1, -1, 10, 100}}}};
  const std::string svg = render_svg({p}, "t");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "<polyline"), 2u);  // broken at the non-positive sample
}

TEST(Plot, ThreeFiguresFromRunDirectory) {
  const Scenario s = short_scenario(tmp_dir("both"));
  run(s);
  const auto paths = emit_plots(s.output_dir);
  ASSERT_EQ(paths.size(), 3u);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
  const std::string fig3 = slurp(s.output_dir + "/state_errors.svg");
  EXPECT_NE(fig3.find(">proposed<"), std::string::npos);
  EXPECT_NE(fig3.find(">baseline<"), std::string::npos);
}

TEST(Plot, BaselineOnlyRunHasOneCurveSet) {
  Scenario s = short_scenario(tmp_dir("baseline_only"));
  s.observers = ObserverSelection::Baseline;
  run(s);
  emit_plots(s.output_dir);
  const std::string fig3 = slurp(s.output_dir + "/state_errors.svg");
  EXPECT_EQ(fig3.find(">proposed<"), std::string::npos);
  EXPECT_NE(fig3.find(">baseline<"), std::string::npos);
}

TEST(Plot, MissingColumnIsSchemaError) {
  Trace tr;
  tr.columns = {"t", "q_bar"};
  tr.rows = {{0.0, 1.0}};
  EXPECT_THROW(emit_plots(tr, tmp_dir("schema")), SchemaError);
}

TEST(Sweep, ParseAxis) {
  const auto a = parse_axis("seed=1,2,3");
  EXPECT_EQ(a.key, "seed");
  EXPECT_EQ(a.values, (std::vector<std::string>{"1", "2", "3"}));
  const auto b = parse_axis("x0=[1,0,0],[0,1,0]");
  EXPECT_EQ(b.values, (std::vector<std::string>{"[1,0,0]", "[0,1,0]"}));
  EXPECT_THROW(parse_axis("seed"), ConfigError);
  EXPECT_THROW(parse_axis("seed=1,,2"), ConfigError);
}

TEST(Sweep, EmptyOverridesEqualsSingleRun) {
  const Scenario s = short_scenario(tmp_dir("single"));
  const auto rows = sweep(s, {}, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].ok);
  Scenario direct = s;
  direct.output_dir = tmp_dir("single_direct");
  run(direct);
  EXPECT_EQ(trace_body(rows[0].directory + "/trace.csv"), trace_body(direct.output_dir + "/trace.csv"));
}

TEST(Sweep, CartesianProductAndFailureMarking) {
  const Scenario s = short_scenario(tmp_dir("grid"));
  const auto rows = sweep(s, {parse_axis("gamma=1,-1"), parse_axis("seed=1,2")}, 2);
  ASSERT_EQ(rows.size(), 4u);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    const bool bad_gamma = r.assignments[0] == "gamma=-1";
    EXPECT_EQ(r.ok, !bad_gamma);
    failed += r.ok ? 0 : 1;
    if (r.ok) EXPECT_TRUE(fs::exists(r.directory + "/report.json"));
  }
  EXPECT_EQ(failed, 2u);
  write_sweep_summary(s.output_dir + "/summary.csv", rows);
  const std::string summary = slurp(s.output_dir + "/summary.csv");
  EXPECT_EQ(count(summary, ",failed,"), 2u);
  EXPECT_EQ(count(summary, ",ok,"), 2u);
}
