// adaptobs: run, sweep, plot and check adaptive-observer scenarios.
//
// Exit codes: 0 success, 2 configuration or schema error, 3 divergence.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "adaptobs/errors.hpp"
#include "adaptobs/model.hpp"
#include "adaptobs/pipeline.hpp"
#include "adaptobs/plot.hpp"
#include "adaptobs/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::string observers;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("config", o.config, "Scenario JSON file (defaults to the built-in worked example)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.overrides, "Override a scenario key, e.g. --set gamma=10 --set control.excitation=false");
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_option("--observers", o.observers, "proposed | baseline | both");
}

adaptobs::Scenario load(const CommonOptions& o) {
  adaptobs::Scenario s = o.config.empty() ? adaptobs::Scenario{} : adaptobs::load_scenario(o.config);
  for (const auto& a : o.overrides) adaptobs::apply_override(s, a);
  if (!o.out.empty()) s.output_dir = o.out;
  if (!o.observers.empty()) s.observers = adaptobs::parse_observers(o.observers);
  s.validate();
  return s;
}

void print_report(const adaptobs::RunReport& r) {
  std::cout << "  terminal |x~| proposed : " << r.terminal_x_tilde << '\n'
            << "  terminal |x~| baseline : " << r.terminal_x_tilde_baseline << '\n'
            << "  terminal |kappa~|      : " << r.terminal_kappa_tilde << '\n'
            << "  excitation             : " << (r.fe_met ? "FE met" : "FE not met") << ", t_e = " << r.t_e << '\n'
            << "  decay rate (R^2)       : " << r.decay_rate << " (" << r.decay_r2 << ")\n"
            << "  singularity events     : proposed " << r.events_proposed << ", baseline "
            << r.events_baseline << '\n'
            << "  wall clock             : " << r.wall_clock_s << " s\n";
  if (r.diverged) std::cout << "  DIVERGED: " << r.failure << '\n';
}

int cmd_run(const CommonOptions& o, std::optional<double> dump_at, bool plots) {
  auto s = load(o);
  if (dump_at) s.dump_cascade_at = *dump_at;
  std::cout << "running " << s.model << " -> " << s.output_dir << '\n';
  const auto res = adaptobs::run(s);
  print_report(res.report);
  if (res.cascade_dump) std::cout << "  cascade dump           : " << s.output_dir << "/cascade.json\n";
  if (plots && !res.trace.rows.empty())
    for (const auto& p : adaptobs::emit_plots(s.output_dir)) std::cout << "  wrote " << p << '\n';
  return res.report.diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep(const CommonOptions& o, const std::vector<std::string>& axes_text, std::size_t jobs) {
  auto s = load(o);
  std::vector<adaptobs::SweepAxis> axes;
  for (const auto& a : axes_text) axes.push_back(adaptobs::parse_axis(a));
  const auto rows = adaptobs::sweep(s, axes, jobs);
  std::filesystem::create_directories(s.output_dir);
  const std::string summary = (std::filesystem::path(s.output_dir) / "summary.csv").string();
  adaptobs::write_sweep_summary(summary, rows);
  bool any_failed = false;
  for (const auto& r : rows) {
    std::string joined;
    for (const auto& a : r.assignments) joined += a + ' ';
    std::cout << (r.ok ? "ok     " : "FAILED ") << r.directory << "  " << joined
              << " |x~|=" << r.report.terminal_x_tilde << " rate=" << r.report.decay_rate;
    if (!r.ok) std::cout << "  (" << r.failure << ')';
    std::cout << '\n';
    any_failed = any_failed || !r.ok;
  }
  std::cout << "summary: " << summary << '\n';
  return any_failed ? kExitDiverged : kExitOk;
}

int cmd_check(const CommonOptions& o) {
  const auto s = load(o);
  const auto model = adaptobs::ModelRegistry::instance().create(s.model, s.params);
  bool ok = true;
  for (const auto& c : adaptobs::check_model(model, s.params.seed)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  " << c.detail;
    std::cout << '\n';
    ok = ok && c.passed;
  }
  std::cout << "scenario valid\n";
  return ok ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive observer scenarios: physical-state reconstruction without estimated-transform inversion"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, check_opts;
  std::optional<double> dump_at;
  bool plots = false;
  auto* run = app.add_subcommand("run", "Simulate one scenario and write trace, events and report");
  add_common(run, run_opts);
  run->add_option("--dump-cascade", dump_at, "Write every cascade stage at this time to cascade.json");
  run->add_flag("--plots", plots, "Also render the SVG figures");

  std::vector<std::string> axes;
  std::size_t jobs = 0;
  auto* sw = app.add_subcommand("sweep", "Run a cartesian grid of overrides in parallel");
  add_common(sw, sweep_opts);
  sw->add_option("-a,--axis", axes, "Swept key and values, e.g. --axis seed=1,2,3 --axis gamma=0.1,1,10");
  sw->add_option("-j,--jobs", jobs, "Parallel runs (0: hardware concurrency)");

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "Render SVG figures from a run directory");
  plot->add_option("run_dir", plot_dir, "Directory containing trace.csv")->required()->check(CLI::ExistingDirectory);

  auto* check = app.add_subcommand("check", "Validate a scenario and the model invariants");
  add_common(check, check_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, dump_at, plots);
    if (*sw) return cmd_sweep(sweep_opts, axes, jobs);
    if (*check) return cmd_check(check_opts);
    if (*plot) {
      for (const auto& p : adaptobs::emit_plots(plot_dir)) std::cout << "wrote " << p << '\n';
      return kExitOk;
    }
  } catch (const adaptobs::ConfigError& e) {
    std::cerr << "configuration error:\n";
    for (const auto& f : e.fields()) std::cerr << "  " << f << '\n';
    return kExitConfig;
  } catch (const adaptobs::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
