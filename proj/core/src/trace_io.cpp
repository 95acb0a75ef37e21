#include "adaptobs/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptobs/scenario.hpp"

namespace adaptobs {

using nlohmann::json;

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "t",          "y",           "u",           "delta",        "x1",           "x2",
      "x3",         "xi1",         "xi2",         "xi3",          "xhat1",        "xhat2",
      "xhat3",      "xihat1",      "xihat2",      "xihat3",       "xtilde_norm",  "kappa_tilde_norm",
      "psi_a_err",  "psi_b_err",   "gamma_err",   "o_gamma_err",  "t_i_err",      "q_bar",
      "phi_eta_true", "phi_eta_hat", "identity_resid", "equality_resid", "Delta",        "det_phi",
      "k_gain",     "lambda_min_phi", "lambda_min_window", "M_psi", "M_theta",    "M_kappa_sign",
      "M_kappa_log", "m_norm",     "xhat_bl1",    "xhat_bl2",     "xhat_bl3",     "xtilde_bl_norm",
      "decomp_err", "jump_prop",   "jump_bl",     "events_prop",  "events_bl"};
  return cols;
}

std::size_t Trace::index(const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw SchemaError("trace: missing column '" + column + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool Trace::has(const std::string& column) const {
  return std::find(columns.begin(), columns.end(), column) != columns.end();
}

std::vector<double> Trace::column(const std::string& name) const {
  const std::size_t j = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

namespace {

void put_double(std::string& line, double v) {
  char buf[32];
  if (std::isnan(v)) {
    line += "nan";
    return;
  }
  if (std::isinf(v)) {
    line += v > 0 ? "inf" : "-inf";
    return;
  }
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw SchemaError("trace: cannot parse number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << kTraceVersionLine << '\n';
  out << "# scenario " << trace.scenario_json << '\n';
  std::string line;
  for (std::size_t j = 0; j < trace.columns.size(); ++j) line += (j ? "," : "") + trace.columns[j];
  out << line << '\n';
  for (const auto& r : trace.rows) {
    line.clear();
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) line += ',';
      put_double(line, r[j]);
    }
    out << line << '\n';
  }
  if (!trace.failure.empty()) out << "# FAILED " << trace.failure << '\n';
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open trace '" + path + "'");
  Trace t;
  std::string line;
  if (!std::getline(in, line) || line != kTraceVersionLine) {
    throw SchemaError("trace: '" + path + "' is not an adaptobs v1 trace");
  }
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# scenario ", 0) == 0) {
      t.scenario_json = line.substr(11);
      continue;
    }
    if (line.rfind("# FAILED ", 0) == 0) {
      t.failure = line.substr(9);
      continue;
    }
    if (line[0] == '#') continue;
    if (!have_header) {
      t.columns = split(line);
      have_header = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) throw SchemaError("trace: ragged row");
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) row[j] = parse_double(cells[j]);
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw SchemaError("trace: no header row");
  return t;
}

void write_events_csv(const std::string& path, const std::vector<SingularityEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t,observer,denominator,value,kind\n";
  std::string line;
  for (const auto& e : events) {
    line.clear();
    put_double(line, e.t);
    line += "," + e.observer + ",\"" + e.denominator + "\",";
    put_double(line, e.value);
    line += "," + e.kind;
    out << line << '\n';
  }
}

std::vector<SingularityEvent> read_events_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open events '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "t,observer,denominator,value,kind") throw SchemaError("events: unexpected header");
  std::vector<SingularityEvent> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // The denominator name is quoted and may contain commas.
    const auto q1 = line.find('"');
    const auto q2 = line.find('"', q1 + 1);
    if (q1 == std::string::npos || q2 == std::string::npos) throw SchemaError("events: malformed row");
    const auto head = split(line.substr(0, q1));
    const auto tail = split(line.substr(q2 + 2));
    if (head.size() < 2 || tail.size() != 2) throw SchemaError("events: malformed row");
    out.push_back({parse_double(head[0]), head[1], line.substr(q1 + 1, q2 - q1 - 1), parse_double(tail[0]), tail[1]});
  }
  return out;
}

RunReport summarize(const Trace& trace, const std::vector<SingularityEvent>& events, double decay_window) {
  RunReport r;
  Scenario s;
  if (!trace.scenario_json.empty()) s = scenario_from_json(trace.scenario_json);
  r.model = s.model;
  r.seed = s.params.seed;
  r.sigma = s.params.sigma;
  r.gamma = s.params.gamma;
  r.t_eps = s.params.t_eps;
  r.t_end = s.params.t_end;
  r.excitation = s.params.excitation;
  r.failure = trace.failure;
  r.diverged = !trace.failure.empty();

  for (const auto& e : events) {
    if (e.observer == "proposed") ++r.events_proposed;
    if (e.observer == "baseline") {
      ++r.events_baseline;
      if (e.kind == "guard") ++r.guard_events_baseline;
    }
  }
  if (trace.rows.empty()) return r;

  const auto t = trace.column("t");
  const auto lam_phi = trace.column("lambda_min_phi");
  const auto lam_win = trace.column("lambda_min_window");
  const auto delta = trace.column("Delta");
  const auto kt = trace.column("kappa_tilde_norm");
  const auto& last = trace.rows.back();
  r.terminal_x_tilde = last[trace.index("xtilde_norm")];
  r.terminal_kappa_tilde = last[trace.index("kappa_tilde_norm")];
  r.terminal_x_tilde_baseline = last[trace.index("xtilde_bl_norm")];
  r.lambda_phi_final = lam_phi.back();
  r.delta_final = delta.back();

  const std::size_t i_p1 = trace.index("identity_resid");
  const std::size_t i_eq = trace.index("equality_resid");
  const std::size_t i_dc = trace.index("decomp_err");
  const std::size_t i_jp = trace.index("jump_prop");
  const std::size_t i_jb = trace.index("jump_bl");
  const auto fmax = [](double a, double b) { return std::isnan(b) ? a : std::max(a, b); };
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& row = trace.rows[i];
    if (t[i] >= s.params.t_eps) r.identity_residual_max = fmax(r.identity_residual_max, row[i_p1]);
    r.equality_max = fmax(r.equality_max, row[i_eq]);
    r.decomposition_max = fmax(r.decomposition_max, row[i_dc]);
    r.max_jump_proposed = fmax(r.max_jump_proposed, row[i_jp]);
    r.max_jump_baseline = fmax(r.max_jump_baseline, row[i_jb]);
    if (t[i] >= s.params.t_eps) {
      r.lambda_window_max = fmax(r.lambda_window_max, lam_win[i]);
      if (std::isnan(r.lambda_window_first_positive) && lam_win[i] > s.options.fe_alpha * 1e-3) {
        r.lambda_window_first_positive = t[i];
      }
    }
    if (!r.fe_met && t[i] > s.params.t_eps && lam_phi[i] >= s.options.fe_alpha) {
      r.fe_met = true;
      r.t_e = t[i];
    }
  }
  if (r.fe_met) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= r.t_e) dmin = std::min(dmin, std::abs(delta[i]));
    r.delta_min_after_t_e = dmin;
    r.decay_window_start = r.t_e;
    r.decay_window_end = std::min(r.t_e + decay_window, t.back());
    const DecayFit fit = fit_decay(t, kt, r.decay_window_start, r.decay_window_end);
    r.decay_rate = fit.rate;
    r.decay_r2 = fit.r2;
    r.decay_residual = fit.residual;
  }
  return r;
}

std::string report_to_json(const RunReport& r) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j = {{"model", r.model},
            {"seed", r.seed},
            {"sigma", r.sigma},
            {"gamma", r.gamma},
            {"t_eps", r.t_eps},
            {"t_end", r.t_end},
            {"excitation", r.excitation},
            {"terminal_x_tilde", num(r.terminal_x_tilde)},
            {"terminal_kappa_tilde", num(r.terminal_kappa_tilde)},
            {"terminal_x_tilde_baseline", num(r.terminal_x_tilde_baseline)},
            {"fe_met", r.fe_met},
            {"fe_flag", r.fe_met ? "FE met" : "FE not met"},
            {"t_e", num(r.t_e)},
            {"lambda_window_max", num(r.lambda_window_max)},
            {"lambda_window_first_positive", num(r.lambda_window_first_positive)},
            {"lambda_phi_final", num(r.lambda_phi_final)},
            {"delta_min_after_t_e", num(r.delta_min_after_t_e)},
            {"delta_final", num(r.delta_final)},
            {"decay_rate", num(r.decay_rate)},
            {"decay_r2", num(r.decay_r2)},
            {"decay_residual", num(r.decay_residual)},
            {"decay_window", {num(r.decay_window_start), num(r.decay_window_end)}},
            {"identity_residual_max", num(r.identity_residual_max)},
            {"equality_max", num(r.equality_max)},
            {"decomposition_max", num(r.decomposition_max)},
            {"max_jump_proposed", num(r.max_jump_proposed)},
            {"max_jump_baseline", num(r.max_jump_baseline)},
            {"events_proposed", r.events_proposed},
            {"events_baseline", r.events_baseline},
            {"guard_events_baseline", r.guard_events_baseline},
            {"wall_clock_s", r.wall_clock_s},
            {"diverged", r.diverged},
            {"failure", r.failure}};
  return j.dump(2);
}

void write_report(const std::string& path, const RunReport& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << report_to_json(r) << '\n';
}

}  // namespace adaptobs
