// Acceptance suite for the worked example. Prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.
//
//   adaptobs_acceptance [--out DIR]

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adaptobs/example_system.hpp"
#include "adaptobs/hetero.hpp"
#include "adaptobs/matrix.hpp"
#include "adaptobs/observers.hpp"
#include "adaptobs/pipeline.hpp"
#include "adaptobs/sweep.hpp"

using namespace adaptobs;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11f", v);
  return buf;
}

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Outcome> results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
  results.push_back({id, name, pass, detail});
  std::cout << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail << std::endl;
}

// Threshold separating a positive excitation level from numerical noise.
constexpr double kLambdaPositive = 1e-12;
// Below this the state error is at the integration floor and the envelope
// is no longer expected to shrink.
constexpr double kStateFloor = 1e-4;
constexpr double kEnvelopeWindow = 5.0;

// 1. adj(m)m = det(m)I for random full-rank and rank-deficient matrices.
void adjugate_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  int deficient = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
    std::size_t rank = n;
    if (trial % 4 == 1) rank = n - 1;
    if (trial % 8 == 3 && n > 2) rank = n - 2;
    deficient += rank < n ? 1 : 0;
    Matrix a(n, rank), b(rank, n);
    for (double& v : a.data()) v = u(rng);
    for (double& v : b.data()) v = u(rng);
    const Matrix m = a * b;
    const double d = determinant(m);
    worst = std::max(worst, (adjugate(m) * m - d * Matrix::identity(n)).max_abs() / (1.0 + std::abs(d)));
  }
  const double secs = seconds_since(t0);
  record(1, "adjugate identity", worst <= 1e-9 && secs < 1.0,
         "max |adj(m)m - det(m)I|/(1+|det|) = " + sci(worst) + " over 1000 matrices (" +
             std::to_string(deficient) + " rank-deficient), " + sci(secs) + " s");
}

// 5. Y_κ/M_κ = κ for random scalings of the exact mixed regression.
void cascade_oracle() {
  const auto t0 = Clock::now();
  const ExampleConfig cfg;
  const CascadeBundle b = example_bundle(cfg);
  const Vector eta = example_eta(cfg.theta, cfg.rho);
  const Vector kappa = example_true_kappa(cfg);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> expo(-4.0, 4.0);
  double worst = 0.0;
  int nonzero = 0;
  for (int i = 0; i < 100; ++i) {
    const double delta = (i % 3 == 0 ? -1.0 : 1.0) * std::pow(10.0, expo(rng));
    const auto out = run_cascade(scaled(eta, delta), delta, b);
    if (out.kappa.m == 0.0) continue;
    ++nonzero;
    for (std::size_t j = 0; j < kappa.size(); ++j)
      worst = std::max(worst, std::abs(out.kappa.y[j] / out.kappa.m - kappa[j]) / std::max(1.0, std::abs(kappa[j])));
  }
  const double secs = seconds_since(t0);
  record(5, "cascade oracle equivalence", nonzero == 100 && worst <= 1e-8 && secs < 1.0,
         "max relative error " + sci(worst) + " over " + std::to_string(nonzero) + " scalings, " + sci(secs) + " s");
}

// 9. Scaling identity for every worked mapping.
void heterogeneity() {
  const CascadeBundle b = example_bundle(ExampleConfig{});
  std::mt19937_64 rng(9);
  double worst = 0.0;
  bool det_ok = true;
  std::string names;
  for (const auto& m : b.mappings) {
    const HeteroCheck c = check_heterogeneity(m, rng, 1000);
    worst = std::max(worst, c.max_rel_error);
    det_ok = det_ok && c.det_bound_holds;
    names += (names.empty() ? "" : ", ") + m.name;
  }
  record(9, "heterogeneity contract", worst <= 1e-9 && det_ok,
         "max relative error " + sci(worst) + " over 1000 draws each for " + names +
             (det_ok ? "; det bound holds" : "; det bound VIOLATED"));
}

// 10. Exact discrete gradient flow against the closed-form exponential.
void gradient_flow() {
  const ExampleConfig cfg;
  const Vector kappa = example_true_kappa(cfg);
  double worst = 0.0;
  for (const double m : {0.1, 0.6, 1.0}) {
    for (const double gamma : {0.5, 1.0, 10.0}) {
      const auto init = draw_initial_estimates(7, 27, 5);
      ObserverState obs = ObserverState::make(3, init.kappa0, gamma);
      const double e0 = norm(sub(init.kappa0, kappa));
      const double dt = 1e-3;
      const Vector y = scaled(kappa, m);
      for (int k = 1; k <= 10000; ++k) {
        step_adaptive(obs, y, m, dt, k * dt);
        const double expected = std::exp(-gamma * m * m * k * dt) * e0;
        worst = std::max(worst, std::abs(norm(sub(obs.kappa_hat, kappa)) - expected) / e0);
      }
    }
  }
  record(10, "gradient-flow bound", worst <= 1e-9,
         "max |‖κ̃(t)‖ - e^{-γm²t}‖κ̃₀‖| / ‖κ̃₀‖ = " + sci(worst) + " for m in {0.1,0.6,1}, γ in {0.5,1,10}");
}

struct EnvelopeCheck {
  bool kappa_monotone = true;
  bool state_envelope_monotone = true;
  double worst_kappa_ratio = 0.0;
  double worst_envelope_ratio = 0.0;
};

EnvelopeCheck monotonicity(const Trace& tr, double t_e) {
  EnvelopeCheck c;
  const auto t = tr.column("t");
  const auto k = tr.column("kappa_tilde_norm");
  const auto x = tr.column("xtilde_norm");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i - 1] < t_e) continue;
    const double r = k[i] / k[i - 1];
    c.worst_kappa_ratio = std::max(c.worst_kappa_ratio, r);
    if (k[i] > k[i - 1] * (1.0 + 1e-9)) c.kappa_monotone = false;
  }
  std::vector<double> env;
  for (double a = t_e; a + kEnvelopeWindow <= t.back() + 1e-9; a += kEnvelopeWindow) {
    double mx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= a && t[i] < a + kEnvelopeWindow) mx = std::max(mx, x[i]);
    env.push_back(mx);
  }
  for (std::size_t i = 1; i < env.size(); ++i) {
    if (env[i] <= kStateFloor && env[i - 1] <= kStateFloor) continue;
    const double r = env[i] / env[i - 1];
    c.worst_envelope_ratio = std::max(c.worst_envelope_ratio, r);
    if (r > 1.0) c.state_envelope_monotone = false;
  }
  return c;
}

Vector signed_column_after(const Trace& tr, const std::string& col, double t0) {
  Vector out;
  const auto t = tr.column("t");
  const auto v = tr.column(col);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t0) out.push_back(v[i]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_dir = "acceptance_runs";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--out") out_dir = argv[i + 1];
  fs::create_directories(out_dir);
  std::cout << "acceptance output: " << out_dir << std::endl;

  adjugate_identity();
  cascade_oracle();
  heterogeneity();
  gradient_flow();

  // Worked example, both observers, default seed.
  Scenario base;
  base.output_dir = (fs::path(out_dir) / "paper_example").string();
  const auto t_main = Clock::now();
  const RunResult main_run = run(base);
  const double main_secs = seconds_since(t_main);
  const RunReport& rep = main_run.report;
  std::cout << "main run: " << sci(main_secs) << " s wall, t_e = " << rep.t_e
            << ", terminal |x~| = " << sci(rep.terminal_x_tilde) << (rep.diverged ? ", DIVERGED" : "") << std::endl;

  record(2, "measurable regression identity", !rep.diverged && rep.identity_residual_max <= 1e-4 && main_secs < 120.0,
         "max_{t in [25,100]} |q̄ - φ̄ᵀη| = " + sci(rep.identity_residual_max) + ", run " + sci(main_secs) + " s");
  record(3, "regressor equalities", !rep.diverged && rep.equality_max <= 1e-6,
         "max |φ̄_e[2]-φ̄_e[8]|, |φ̄_e[6]-φ̄_e[20]| = " + sci(rep.equality_max));

  // Negative control without the injected excitation.
  Scenario ctrl = base;
  ctrl.params.excitation = false;
  ctrl.output_dir = (fs::path(out_dir) / "no_excitation").string();
  const RunResult ctrl_run = run(ctrl);
  {
    const Trace& tr = main_run.trace;
    double delta_min = std::numeric_limits<double>::quiet_NaN();
    if (rep.fe_met) {
      const Vector d = signed_column_after(tr, "Delta", rep.t_e);
      delta_min = *std::min_element(d.begin(), d.end());
    }
    const auto& c = ctrl_run.report;
    const double k0 = ctrl_run.trace.rows.front()[ctrl_run.trace.index("kappa_tilde_norm")];
    const bool excited = rep.fe_met && rep.lambda_window_max > kLambdaPositive && delta_min > 0.0;
    const bool control_flat = !c.fe_met && c.lambda_window_max < kLambdaPositive && c.terminal_kappa_tilde > 0.5 * k0;
    record(4, "finite excitation and its negative control", excited && control_flat,
           "with injection: max windowed λ_min = " + sci(rep.lambda_window_max) + ", t_e = " + std::to_string(rep.t_e) +
               ", min Δ after t_e = " + sci(delta_min) + "; without: max windowed λ_min = " + sci(c.lambda_window_max) +
               ", |κ̃| " + sci(k0) + " -> " + sci(c.terminal_kappa_tilde));
  }

  record(8, "error decomposition", !rep.diverged && rep.decomposition_max <= 1e-8,
         "max |x̃ - (T̃ξ̃ + Tξ̃ + T̃ξ)| = " + sci(rep.decomposition_max));

  // Seed sweep.
  Scenario sweep_base = base;
  sweep_base.output_dir = (fs::path(out_dir) / "seeds").string();
  const auto t_sweep = Clock::now();
  const auto rows = sweep(sweep_base, {parse_axis("seed=1,2,3,4,5,6,7,8,9,10")});
  const double sweep_secs = seconds_since(t_sweep);
  write_sweep_summary((fs::path(sweep_base.output_dir) / "summary.csv").string(), rows);

  bool conv_ok = sweep_secs < 1200.0;
  bool sing_ok = rep.events_proposed == 0;
  std::ostringstream conv, sing;
  double best_jump_ratio = 0.0;
  std::size_t jump_seeds = 0;
  std::size_t guards = 0;
  double worst_r2 = 1.0, worst_terminal = 0.0, worst_kratio = 0.0, worst_env = 0.0;
  for (const auto& r : rows) {
    if (!r.ok) {
      conv_ok = false;
      sing_ok = false;
      conv << " " << r.assignments[0] << " failed (" << r.failure << ");";
      continue;
    }
    const Trace tr = read_trace_csv(r.directory + "/trace.csv");
    const RunReport& p = r.report;
    const EnvelopeCheck m = p.fe_met ? monotonicity(tr, p.t_e) : EnvelopeCheck{false, false, NAN, NAN};
    const bool ok = p.fe_met && m.kappa_monotone && m.state_envelope_monotone && p.decay_r2 >= 0.95 &&
                    p.terminal_x_tilde <= 1e-4;
    if (!ok) conv << " " << r.assignments[0] << " not converged;";
    conv_ok = conv_ok && ok;
    worst_r2 = std::min(worst_r2, p.decay_r2);
    worst_terminal = std::max(worst_terminal, p.terminal_x_tilde);
    worst_kratio = std::max(worst_kratio, m.worst_kappa_ratio);
    worst_env = std::max(worst_env, m.worst_envelope_ratio);

    sing_ok = sing_ok && p.events_proposed == 0;
    guards += p.guard_events_baseline;
    const double ratio = p.max_jump_baseline / p.max_jump_proposed;
    best_jump_ratio = std::max(best_jump_ratio, ratio);
    if (ratio > 10.0) ++jump_seeds;
    sing << " " << r.assignments[0] << ": baseline events " << p.events_baseline << " (guard "
         << p.guard_events_baseline << "), jump ratio " << sci(ratio) << ";";
  }
  record(6, "exponential convergence over 10 seeds", conv_ok,
         "min R² " + fixed(worst_r2) + ", max terminal |x̃| " + sci(worst_terminal) +
             ", max per-sample |κ̃| ratio " + fixed(worst_kratio) + ", max 5 s |x̃| envelope ratio above " +
             sci(kStateFloor) + " " + fixed(worst_env) + ", sweep " + sci(sweep_secs) + " s;" + conv.str());
  const std::string jump_note =
      jump_seeds > 0 ? std::to_string(jump_seeds) + "/10 seeds show a baseline jump > 10x the proposed maximum (best " +
                           sci(best_jump_ratio) + "x)"
                     : "no seed showed a baseline jump > 10x the proposed maximum (best " + sci(best_jump_ratio) +
                           "x); the phenomenon is initialization-dependent";
  record(7, "singularity contrast", sing_ok,
         "proposed events 0 on all seeds: " + std::string(sing_ok ? "yes" : "NO") + "; baseline guard events total " +
             std::to_string(guards) + "; " + jump_note);
  std::cout << "per-seed baseline detail:" << sing.str() << std::endl;

  std::sort(results.begin(), results.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  std::ofstream summary(fs::path(out_dir) / "acceptance.txt");
  int failed = 0;
  for (const auto& r : results) {
    summary << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << '\n';
    failed += r.pass ? 0 : 1;
  }
  std::cout << "\nSUMMARY: " << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
