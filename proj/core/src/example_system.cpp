#include "adaptobs/example_system.hpp"

#include <cmath>

#include "adaptobs/errors.hpp"

namespace adaptobs {

ConfigError::ConfigError(std::vector<std::string> fields)
    : std::invalid_argument([&] {
        std::string s = "invalid configuration:";
        for (const auto& f : fields) s += "\n  " + f;
        return s;
      }()),
      fields_(std::move(fields)) {}

void ExampleConfig::validate() const {
  std::vector<std::string> bad;
  if (theta.size() != 3) {
    bad.push_back("theta: expected 3 entries");
  } else {
    if (theta[1] == 0.0) bad.push_back("theta[2]: must be non-zero (plant unobservable)");
    if (theta[2] == 0.0) bad.push_back("theta[3]: must be non-zero (plant unobservable)");
  }
  if (!(rho < 0.0)) bad.push_back("rho: must be negative (oscillatory disturbance)");
  if (f.size() != 3) bad.push_back("f: expected 3 entries");
  if (k.size() != 3) bad.push_back("K: expected 3 entries");
  if (x0.size() != 3) bad.push_back("x0: expected 3 entries");
  if (x_delta0.size() != 2) bad.push_back("x_delta0: expected 2 entries");
  if (!(dt > 0.0)) bad.push_back("dt: must be positive");
  if (!(t_eps > 0.0)) bad.push_back("t_eps: must be positive");
  if (!(t_end > t_eps)) bad.push_back("t_end: must exceed t_eps");
  if (!(gamma > 0.0)) bad.push_back("gamma: must be positive");
  if (!std::isfinite(sigma)) bad.push_back("sigma: must be finite");
  if (!bad.empty()) throw ConfigError(bad);
}

PlantModel example_plant(const ExampleConfig& cfg) {
  PlantModel m;
  m.n = 3;
  m.n_theta = 3;
  m.theta = cfg.theta;
  m.a = [](const Vector& t) {
    return Matrix{{0.0, t[0] + t[1], 0.0}, {-t[1], 0.0, t[1]}, {0.0, -t[2], 0.0}};
  };
  m.b = [](const Vector& t) { return Vector{0.0, 0.0, t[2]}; };
  m.d = [](const Vector& t) { return Vector{t[0] * t[1], 0.0, 0.0}; };
  m.c = {0.0, 0.0, 1.0};
  m.x0 = cfg.x0;
  return m;
}

Exosystem example_exosystem(const ExampleConfig& cfg) {
  Exosystem e;
  e.n_delta = 2;
  e.rho = {cfg.rho};
  e.a_delta = [](const Vector& r) { return Matrix{{0.0, 1.0}, {r[0], 0.0}}; };
  e.h = {1.0, 0.0};
  e.x0 = cfg.x_delta0;
  return e;
}

Reduction example_reduction() {
  constexpr std::size_t ne = 27;
  constexpr std::size_t keep[5] = {1, 3, 5, 13, 25};
  Reduction r{Matrix(ne, 5), Matrix(5, ne)};
  for (std::size_t j = 0; j < 5; ++j) {
    r.d_eta(keep[j], j) = 1.0;
    r.l_eta(j, keep[j]) = 1.0;
  }
  // φ̄_e entries 8 and 20 (1-based) duplicate entries 2 and 6.
  r.l_eta(0, 7) = 1.0;
  r.l_eta(2, 19) = 1.0;
  return r;
}

namespace {

Matrix column(const Vector& v) { return Matrix::column(v); }

Matrix g_psi(const Vector& e) {
  const double d1 = e[4] + e[3] * e[1];
  const double d2 = e[3] * e[2] - e[0] * e[4];
  return Matrix::diagonal(Vector{1, d1, 1, 1, 1, d2, 1, -d1, 1});
}

Vector s_psi(const Vector& e) {
  const double d1 = e[4] + e[3] * e[1];
  const double d2 = e[3] * e[2] - e[0] * e[4];
  return {0, d1 * e[0] + d2, 0, e[1], 0, e[4] * d1, 0, d2, 0};
}

Matrix pi_psi(double w) { return Matrix::diagonal(Vector{w, w * w * w, w, w, w, w * w * w, w, w * w, w}); }

Matrix t_g_psi(double d, const Vector& y) {
  return Matrix::diagonal(Vector{d, d * d * y[4] + d * y[3] * y[1], d, d, d, d * (y[3] * y[2] - y[0] * y[4]), d,
                                 -(d * y[4] + y[3] * y[1]), d});
}

Vector t_s_psi(double d, const Vector& y) {
  return {0.0,
          (y[4] * d + y[3] * y[1]) * y[0] + d * (y[3] * y[2] - y[0] * y[4]),
          0.0,
          y[1],
          0.0,
          y[4] * (d * y[4] + y[3] * y[1]),
          0.0,
          y[3] * y[2] - y[0] * y[4],
          0.0};
}

Matrix g_theta(const Vector& p) {
  const double s = p[0] * p[1] + p[2];
  return Matrix::diagonal(Vector{-p[1] * p[1] * p[1] * s, -p[1] * p[1], p[0]});
}

Vector s_theta(const Vector& p) {
  const double s = p[0] * p[1] + p[2];
  return {std::pow(p[1], 4) * p[2] - p[1] * s * s, s, p[1] * p[0]};
}

Matrix pi_theta(double m) { return Matrix::diagonal(Vector{std::pow(m, 5), m * m, m * m}); }

Matrix t_g_theta(double m, const Vector& y) {
  const double s = y[0] * y[1] + m * y[2];
  return Matrix::diagonal(Vector{-y[1] * y[1] * y[1] * s, -y[1] * y[1], m * y[0]});
}

Vector t_s_theta(double m, const Vector& y) {
  const double s = y[0] * y[1] + m * y[2];
  return {std::pow(y[1], 4) * y[2] - y[1] * s * s, s, y[1] * y[0]};
}

Matrix q_of(const Vector& t) { return Matrix{{-t[1] * (t[0] + t[1]), 0, 1}, {0, -1, 0}, {1, 0, 0}}; }
Matrix p_of(const Vector& t) { return Matrix::diagonal(Vector{t[1] * t[2], t[2], 1.0}); }
Matrix pi_ti(double m) { return Matrix::diagonal(Vector{m * m, m, m}); }

Matrix t_q(double m, const Vector& y) {
  return Matrix{{-y[1] * (y[0] + y[1]), 0, m * m}, {0, -m, 0}, {m, 0, 0}};
}

Matrix t_p(double m, const Vector& y) { return Matrix::diagonal(Vector{y[1] * y[2], y[2], m}); }

Matrix pi_o_gamma(double m) { return Matrix::diagonal(Vector{m, m, m * m}); }

Matrix t_o_gamma(double m, const Vector& y, const Vector& f) {
  const double y2 = y[1];
  return Matrix{{-m * f[0], y2 - m * f[1], -m * f[2]},
                {0.0, -m * f[0] - f[2] * y2, y2 - m * f[1]},
                {0.0, -y2 * (m * f[1] - y2), -m * m * f[0] - m * f[2] * y2}};
}

Matrix selector(std::size_t rows, std::size_t cols, std::initializer_list<std::size_t> picks) {
  Matrix s(rows, cols);
  std::size_t r = 0;
  for (std::size_t c : picks) s(r++, c) = 1.0;
  return s;
}

}  // namespace

Matrix example_o_gamma(double rho, const Vector& f) {
  return Matrix{{-f[0], rho - f[1], -f[2]},
                {0.0, -f[0] - f[2] * rho, rho - f[1]},
                {0.0, -rho * (f[1] - rho), -f[0] - f[2] * rho}};
}

CascadeBundle example_bundle(const ExampleConfig& cfg) {
  CascadeBundle b;
  b.n = 3;
  b.n_eta = 5;
  b.n_theta = 3;
  const Vector f = cfg.f;

  b.t_g_psi = t_g_psi;
  b.t_s_psi = t_s_psi;
  b.degree_psi = 14;
  b.t_o_gamma = [f](double m, const Vector& y) { return t_o_gamma(m, y, f); };
  b.pi_o_gamma = pi_o_gamma;
  b.degree_o_gamma = 4;
  b.t_g_theta = t_g_theta;
  b.t_s_theta = t_s_theta;
  b.degree_theta = 9;
  b.t_p = t_p;
  b.t_q = t_q;
  b.degree_ti = 4;

  b.l_gamma = selector(3, 9, {6, 7, 8});
  b.l_ab = selector(3, 9, {1, 3, 5});

  b.mappings = {
      {"G_psi", 14, 5, g_psi, pi_psi, t_g_psi},
      {"S_psi", 14, 5, [](const Vector& e) { return column(s_psi(e)); }, pi_psi,
       [](double w, const Vector& y) { return column(t_s_psi(w, y)); }},
      {"G_theta", 9, 3, g_theta, pi_theta, t_g_theta},
      {"S_theta", 9, 3, [](const Vector& p) { return column(s_theta(p)); }, pi_theta,
       [](double w, const Vector& y) { return column(t_s_theta(w, y)); }},
      {"P", 4, 3, p_of, pi_ti, t_p},
      {"Q", 4, 3, q_of, pi_ti, t_q},
      {"O_Gamma", 4, 3, [f](const Vector& g) { return example_o_gamma(g[1], f); }, pi_o_gamma,
       [f](double w, const Vector& y) { return t_o_gamma(w, y, f); }},
  };
  return b;
}

BaselineMaps example_baseline_maps(const ExampleConfig& cfg) {
  BaselineMaps m;
  m.f_psi = [](const Vector& e) {
    const double d1 = e[4] + e[3] * e[1];
    const double d2 = e[3] * e[2] - e[0] * e[4];
    GuardedValue g;
    g.denominators = {{"eta5+eta4*eta2", d1}, {"eta4*eta3-eta1*eta5", d2}};
    g.value = {0.0, e[0] + d2 / d1, 0.0, e[1], 0.0, e[4] * d1 / d2, 0.0, -d2 / d1, 0.0};
    return g;
  };
  m.f_theta = [](const Vector& p) {
    const double s = p[0] * p[1] + p[2];
    const double den1 = -p[1] * p[1] * p[1] * s;
    const double den2 = -p[1] * p[1];
    GuardedValue g;
    g.denominators = {{"-psi2ab^3*(psi1ab*psi2ab+psi3ab)", den1}, {"-psi2ab^2", den2}};
    g.value = {(std::pow(p[1], 4) * p[2] - p[1] * s * s) / den1, s / den2, p[1]};
    return g;
  };
  m.t_i = [](const Vector& t) {
    GuardedValue g;
    g.denominators = {{"theta3", t[2]}, {"theta2*theta3", t[1] * t[2]}};
    g.value = vec(example_t_i(t));
    return g;
  };
  const Vector f = cfg.f;
  m.o_gamma = [f](const Vector& g) { return example_o_gamma(g[1], f); };
  m.l_ab = selector(3, 9, {1, 3, 5});
  m.l_gamma = selector(3, 9, {6, 7, 8});
  return m;
}

double example_control(double t, double y, const ExampleConfig& cfg) {
  double inject = 0.0;
  if (cfg.excitation && t >= cfg.t_eps) {
    inject = cfg.excitation_amplitude * std::sin(cfg.excitation_frequency * t) *
             std::exp(-cfg.excitation_decay * (t - cfg.t_eps));
  }
  return -cfg.control_gain * (inject + cfg.setpoint - y);
}

Vector example_psi(const Vector& t, double rho) {
  return {0.0, -(t[0] + t[1] + t[2]) * t[1], 0.0, t[2], 0.0, t[2] * t[1] * (t[1] + t[0]), 0.0, rho, 0.0};
}

double example_psi_d(const Vector& t) { return t[0] * t[1] * t[1] * t[2]; }

Vector example_eta(const Vector& theta, double rho) {
  const Vector p = example_psi(theta, rho);
  const double pa2 = p[1], pb1 = p[3], pb3 = p[5];
  return {pa2 + rho, pb1, pb3 - pb1 * rho, -pa2 * rho, -pb3 * rho};
}

Matrix example_t_i(const Vector& t) {
  return Matrix{{-(t[0] + t[1]) / t[2], 0.0, 1.0 / (t[1] * t[2])}, {0.0, -1.0 / t[2], 0.0}, {1.0, 0.0, 0.0}};
}

Vector example_true_kappa(const ExampleConfig& cfg) {
  return pack_kappa(example_psi(cfg.theta, cfg.rho), example_o_gamma(cfg.rho, cfg.f), example_t_i(cfg.theta));
}

}  // namespace adaptobs
