#include "adaptobs/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "adaptobs/integrator.hpp"
#include "adaptobs/rng.hpp"

namespace adaptobs {

using nlohmann::json;

InitialEstimates draw_initial_estimates(std::uint64_t seed, std::size_t n_kappa, std::size_t n_eta) {
  PortableRng rng(seed);
  InitialEstimates e;
  e.kappa0 = rng.uniform_vector(n_kappa, 10.0);
  e.eta0 = rng.uniform_vector(n_eta, 10.0);
  return e;
}

std::string cascade_dump_json(double t, const CascadeOutput& c, const NormalizedRegression& nr,
                              const MixedRegression& mixed) {
  const auto stage_v = [](const StageVector& s) {
    return json{{"Y", s.y}, {"M", s.m}, {"log_scale", s.log_scale}};
  };
  const auto stage_m = [](const StageMatrix& s) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.y.rows(); ++i) rows.push_back(s.y.row_vector(i));
    return json{{"Y", rows}, {"M", s.m}, {"log_scale", s.log_scale}};
  };
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j = {{"t", t},
            {"note", "stage pairs are gauge-scaled; true values are (Y, M) * exp(log_scale)"},
            {"mixed", {{"Y", mixed.y}, {"Delta", mixed.delta}, {"k", mixed.k}, {"det_phi", mixed.det_phi}}},
            {"psi", stage_v(c.psi)},
            {"o_gamma", stage_m(c.o_gamma)},
            {"theta", stage_v(c.theta)},
            {"t_i", stage_m(c.t_i)},
            {"kappa",
             {{"Y_factored", c.kappa.y},
              {"M_factored", c.kappa.m},
              {"log_abs_M_kappa", finite_or_null(c.kappa.log_abs_m_kappa)},
              {"sign_M_kappa", c.kappa.sign_m_kappa}}},
            {"normalized", {{"Y", nr.y}, {"M", nr.m}}}};
  if (c.kappa.m != 0.0) {
    Vector ratio(c.kappa.y.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = c.kappa.y[i] / c.kappa.m;
    j["kappa"]["ratio"] = ratio;
  }
  return j.dump(2);
}

namespace {

// Index pairs of φ̄_e entries that the reduction assumes equal: entries merged
// into the same η component.
std::vector<std::pair<std::size_t, std::size_t>> merged_pairs(const Reduction& r) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < r.l_eta.rows(); ++i) {
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < r.l_eta.cols(); ++j)
      if (r.l_eta(i, j) != 0.0) nz.push_back(j);
    for (std::size_t a = 1; a < nz.size(); ++a) pairs.emplace_back(nz[0], nz[a]);
  }
  return pairs;
}

double true_value(double m, double log_scale) { return m * std::exp(log_scale); }

}  // namespace

RunResult simulate(const Scenario& sc, const ModelInstance& m) {
  const auto wall_start = std::chrono::steady_clock::now();
  const ExampleConfig& p = sc.params;
  const PipelineOptions& opt = sc.options;
  const LinearPlant plant = m.plant.evaluate();
  const LinearExosystem exo = m.exosystem.evaluate();
  const FilterGains& g = m.gains;
  const std::size_t n = plant.order();
  const std::size_t nd = exo.order();
  const std::size_t ne = extended_dim(n);
  const std::size_t n_eta = m.reduction.reduced_dim();
  const std::size_t nf = FilterLayout{n}.size();
  const bool run_prop = sc.observers != ObserverSelection::Baseline;
  const bool run_bl = sc.observers != ObserverSelection::Proposed;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Vector state(n + nd + nf, 0.0);
  std::copy(m.plant.x0.begin(), m.plant.x0.end(), state.begin());
  std::copy(m.exosystem.x0.begin(), m.exosystem.x0.end(), state.begin() + static_cast<std::ptrdiff_t>(n));
  const std::span<double> x_span(state.data(), n);
  const std::span<const double> filt(state.data() + n + nd, nf);

  DremState drem = DremState::make(n_eta, DremConfig{p.sigma, p.t_eps, opt.eps_k, opt.k_min, opt.k_max});
  const InitialEstimates init = draw_initial_estimates(p.seed, m.bundle.kappa_dim(), n_eta);
  ObserverState obs = ObserverState::make(n, init.kappa0, p.gamma);
  BaselineState bl = BaselineState::make(n, init.eta0, p.gamma, opt.eps_div);

  const auto pairs = merged_pairs(m.reduction);
  const Matrix& t_i_true = m.canonical.t_i;
  const Matrix& t_true = m.canonical.t;
  const KappaLayout layout{n};

  RunResult res;
  res.trace.columns = trace_columns();
  res.trace.scenario_json = json::parse(scenario_to_json(sc)).dump();

  Vector phi_e(ne, 0.0), phi_bar(n_eta, 0.0), xi_hat(n, 0.0), x_hat(n, 0.0), prev_x_hat(n, 0.0);
  Vector x_bl(n, nan), prev_x_bl(n, nan);
  Vector phi_times;
  std::vector<Vector> phi_hist;
  MixedRegression mixed{Vector(n_eta, 0.0), 0.0, 0.0, 0.0, false};
  CascadeOutput cascade;
  NormalizedRegression nr{Vector(m.bundle.kappa_dim(), 0.0), 0.0};
  double q_bar = 0.0, u = 0.0, y = dot(plant.c, x_span), delta_dist = 0.0;
  double identity_max = 0.0, equality_max = 0.0, jump_p = 0.0, jump_b = 0.0;
  bool engaged = false, dumped = false;

  const long long n_steps = std::llround(p.t_end / p.dt);
  const long long k_eps = std::llround(p.t_eps / p.dt);
  Rk4Workspace ws;

  auto deriv = [&](std::span<const double> in, std::span<double> out) {
    const double yy = dot(plant.c, in.first(n));
    plant_derivative(plant, exo, u, in.first(n + nd), out.first(n + nd));
    filter_derivative(g, u, yy, in.subspan(n + nd), out.subspan(n + nd));
  };

  auto record = [&](double t) {
    std::vector<double> row;
    row.reserve(res.trace.columns.size());
    const Vector x(x_span.begin(), x_span.end());
    const Vector xi = t_true * x;
    row.insert(row.end(), {t, y, u, delta_dist});
    row.insert(row.end(), x.begin(), x.end());
    row.insert(row.end(), xi.begin(), xi.end());
    if (run_prop) {
      row.insert(row.end(), x_hat.begin(), x_hat.end());
      row.insert(row.end(), xi_hat.begin(), xi_hat.end());
      row.push_back(norm(sub(x_hat, x)));
      const Vector kt = sub(obs.kappa_hat, m.true_kappa);
      row.push_back(norm(kt));
      row.push_back(norm(std::span(kt).subspan(layout.psi_a(), n)));
      row.push_back(norm(std::span(kt).subspan(layout.psi_b(), n)));
      row.push_back(norm(std::span(kt).subspan(layout.gamma(), n)));
      row.push_back(norm(std::span(kt).subspan(layout.o_gamma(), n * n)));
      row.push_back(norm(std::span(kt).subspan(layout.t_i(), n * n)));
    } else {
      row.insert(row.end(), 2 * n + 7, nan);
    }
    row.push_back(q_bar);
    row.push_back(dot(phi_bar, m.true_eta));
    if (run_prop) {
      const Vector eta_e_hat = true_eta_e(obs.psi_a(), obs.psi_b(), obs.gamma_vec());
      row.push_back(dot(phi_bar, m.reduction.l_eta * eta_e_hat));
    } else {
      row.push_back(nan);
    }
    row.push_back(identity_max);
    row.push_back(equality_max);
    row.push_back(mixed.delta);
    row.push_back(mixed.det_phi);
    row.push_back(mixed.k);
    row.push_back(engaged ? min_symmetric_eigenvalue(drem.phi) : 0.0);
    row.push_back(nan);  // lambda_min_window, filled after the run
    row.push_back(engaged ? true_value(cascade.psi.m, cascade.psi.log_scale) : 0.0);
    row.push_back(engaged ? true_value(cascade.theta.m, cascade.theta.log_scale) : 0.0);
    row.push_back(engaged ? cascade.kappa.sign_m_kappa : 0.0);
    row.push_back(engaged ? cascade.kappa.log_abs_m_kappa : -std::numeric_limits<double>::infinity());
    row.push_back(nr.m);
    if (run_bl) {
      row.insert(row.end(), x_bl.begin(), x_bl.end());
      row.push_back(norm(sub(x_bl, x)));
    } else {
      row.insert(row.end(), n + 1, nan);
    }
    if (run_prop) {
      const Vector direct = sub(x_hat, x);
      const Vector decomp = error_decomposition(obs.t_i(), xi_hat, t_i_true, xi);
      row.push_back(norm(sub(direct, decomp)));
    } else {
      row.push_back(nan);
    }
    row.push_back(run_prop ? jump_p : nan);
    row.push_back(run_bl ? jump_b : nan);
    std::size_t ev_prop = 0, ev_bl = 0;
    for (const auto& e : res.events) (e.observer == "proposed" ? ev_prop : ev_bl)++;
    row.push_back(static_cast<double>(ev_prop));
    row.push_back(static_cast<double>(ev_bl));
    res.trace.rows.push_back(std::move(row));
    identity_max = equality_max = jump_p = jump_b = 0.0;
  };

  if (run_prop) {
    reconstruct_into(obs, filt, g, xi_hat, x_hat);
    prev_x_hat = x_hat;
  }
  delta_dist = disturbance_output(exo, std::span<const double>(state).subspan(n, nd));
  phi_times.push_back(0.0);
  phi_hist.push_back(phi_bar);
  record(0.0);

  try {
    for (long long k = 0; k < n_steps; ++k) {
      const double t = static_cast<double>(k) * p.dt;
      y = dot(plant.c, x_span);
      u = m.control(t, y);
      rk4_step(std::span<double>(state), p.dt, deriv, ws);
      const double tn = static_cast<double>(k + 1) * p.dt;
      check_finite(state, "plant/filter state", tn);

      y = dot(plant.c, x_span);
      delta_dist = disturbance_output(exo, std::span<const double>(state).subspan(n, nd));
      q_bar = extended_regressor_into(filt, g, y, phi_e);
      identity_max = std::max(identity_max, std::abs(q_bar - dot(phi_e, m.true_eta_e)));
      for (const auto& [a, b] : pairs) equality_max = std::max(equality_max, std::abs(phi_e[a] - phi_e[b]));
      reduce_into(phi_e, m.reduction, phi_bar);
      if ((k + 1) % static_cast<long long>(opt.phi_stride) == 0) {
        phi_times.push_back(tn);
        phi_hist.push_back(phi_bar);
      }

      double y_scale = 0.0;
      if (k + 1 >= k_eps) {
        step_extension(drem, phi_bar, q_bar, tn);
        mixed = mix(drem);
        cascade = run_cascade(mixed.y, mixed.delta, m.bundle, CascadeOptions{opt.gauge});
        nr = normalize_regression(cascade.kappa, opt.eps_norm);
        engaged = true;
        y_scale = std::abs(mixed.delta) + opt.eps_norm * norm(mixed.y);
      }

      if (run_prop) {
        step_adaptive(obs, nr.y, nr.m, p.dt, t);
        reconstruct_into(obs, filt, g, xi_hat, x_hat);
        jump_p = std::max(jump_p, norm(sub(x_hat, prev_x_hat)));
        prev_x_hat = x_hat;
      }
      if (run_bl) {
        Vector yb(n_eta, 0.0);
        double db = 0.0;
        if (y_scale > 0.0 && std::isfinite(y_scale)) {
          yb = scaled(mixed.y, 1.0 / y_scale);
          db = mixed.delta / y_scale;
        }
        const Reconstruction r = step_baseline(bl, m.baseline, yb, db, filt, g, p.dt, t, res.events);
        x_bl = r.x;
        if (bl.have_maps && std::isfinite(prev_x_bl[0])) jump_b = std::max(jump_b, norm(sub(x_bl, prev_x_bl)));
        prev_x_bl = bl.have_maps ? x_bl : Vector(n, nan);
      }

      if (!dumped && !std::isnan(sc.dump_cascade_at) && tn >= sc.dump_cascade_at) {
        res.cascade_dump = cascade_dump_json(tn, cascade, nr, mixed);
        dumped = true;
      }
      if ((k + 1) % static_cast<long long>(sc.decimation) == 0 || k + 1 == n_steps) record(tn);
    }
  } catch (const DivergenceError& e) {
    res.trace.failure = e.what();
  }

  // Trailing-window excitation level at each trace row.
  if (phi_times.size() > 1 && phi_times.back() - phi_times.front() >= opt.fe_window) {
    const double h = static_cast<double>(opt.phi_stride) * p.dt;
    const std::size_t stride = std::max<std::size_t>(1, sc.decimation / opt.phi_stride);
    const ExcitationSeries ex = excitation_level(phi_times, phi_hist, opt.fe_window, stride);
    const std::size_t col = res.trace.index("lambda_min_window");
    for (auto& row : res.trace.rows) {
      const long long idx = std::llround((row[0] - opt.fe_window) / h);
      if (idx < 0 || idx % static_cast<long long>(stride) != 0) continue;
      const auto pos = static_cast<std::size_t>(idx) / stride;
      if (pos < ex.lambda_min.size()) row[col] = ex.lambda_min[pos];
    }
  }

  res.report = summarize(res.trace, res.events);
  res.report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return res;
}

RunResult simulate(const Scenario& sc) {
  sc.validate();
  return simulate(sc, ModelRegistry::instance().create(sc.model, sc.params));
}

RunResult run(const Scenario& sc) {
  namespace fs = std::filesystem;
  RunResult res = simulate(sc);
  const fs::path dir(sc.output_dir);
  fs::create_directories(dir);
  write_trace_csv((dir / "trace.csv").string(), res.trace);
  write_events_csv((dir / "events.csv").string(), res.events);
  if (res.cascade_dump) {
    std::ofstream out(dir / "cascade.json");
    out << *res.cascade_dump << '\n';
  }
  const double wall = res.report.wall_clock_s;
  res.report = summarize(read_trace_csv((dir / "trace.csv").string()),
                         read_events_csv((dir / "events.csv").string()));
  res.report.wall_clock_s = wall;
  write_report((dir / "report.json").string(), res.report);
  return res;
}

}  // namespace adaptobs
