#include "adaptobs/observers.hpp"

#include <array>
#include <cmath>

#include "adaptobs/integrator.hpp"

namespace adaptobs {

Vector pack_kappa(std::span<const double> psi, const Matrix& o_gamma, const Matrix& t_i) {
  return concat({psi, vec(o_gamma), vec(t_i)});
}

ObserverState ObserverState::make(std::size_t n, Vector kappa0, double gamma) {
  ObserverState s;
  s.layout.n = n;
  if (kappa0.size() != s.layout.size()) throw DimensionError("observer: kappa0 has wrong length");
  if (!(gamma > 0.0)) throw std::invalid_argument("observer: gamma must be positive");
  s.kappa_hat = std::move(kappa0);
  s.gamma = gamma;
  return s;
}

Matrix ObserverState::o_gamma() const {
  return unvec(std::span(kappa_hat).subspan(layout.o_gamma(), layout.n * layout.n), layout.n, layout.n);
}

Matrix ObserverState::t_i() const {
  return unvec(std::span(kappa_hat).subspan(layout.t_i(), layout.n * layout.n), layout.n, layout.n);
}

void step_adaptive(ObserverState& obs, std::span<const double> y, double m, double dt, double t) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_adaptive: dt must be positive");
  if (y.size() != obs.kappa_hat.size()) throw DimensionError("step_adaptive: Y_kappa length mismatch");
  const double rate = obs.gamma * m * m * dt;
  const double decay = std::exp(-rate);
  // (1 − e^{−γm²dt})/m² → γdt as m → 0; expm1 keeps the small-m branch exact.
  const double gain = rate > 0.0 ? -std::expm1(-rate) / (m * m) : obs.gamma * dt;
  for (std::size_t i = 0; i < y.size(); ++i) {
    obs.kappa_hat[i] = decay * obs.kappa_hat[i] + gain * m * y[i];
  }
  for (double v : obs.kappa_hat) {
    if (!std::isfinite(v)) {
      throw DivergenceError("non-finite kappa estimate (gamma*M^2*dt = " + std::to_string(rate) + ")",
                            t + dt);
    }
  }
}

void reconstruct_into(const ObserverState& obs, std::span<const double> filters, const FilterGains& g,
                      std::span<double> xi, std::span<double> x) {
  const std::size_t n = obs.layout.n;
  if (n > 8) throw DimensionError("reconstruct_into: order above 8 not supported");
  const FilterLayout L{n};
  const double* s = filters.data();
  const double* z = s + L.z();
  const double* p = s + L.p();
  const double* om = s + L.omega();
  const double* fs = s + L.f();
  const double* h = s + L.h();
  const double* nm = s + L.nn();
  const double* k = obs.kappa_hat.data();
  const double* pa = k + obs.layout.psi_a();
  const double* pb = k + obs.layout.psi_b();
  const double* og = k + obs.layout.o_gamma();  // column-major
  const double* ti = k + obs.layout.t_i();      // column-major

  std::array<double, 8> inner{};
  std::array<double, 8> tmp{};
  for (std::size_t i = 0; i < n; ++i) {
    double v = fs[i];
    for (std::size_t j = 0; j < n; ++j) v -= nm[i * n + j] * pa[j] + h[i * n + j] * pb[j];
    inner[i] = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += og[j * n + i] * inner[j];
    tmp[i] = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = z[i];
    for (std::size_t j = 0; j < n; ++j) v += g.o_e_inv(i, j) * tmp[j] + om[i * n + j] * pa[j] + p[i * n + j] * pb[j];
    xi[i] = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += ti[j * n + i] * xi[j];
    x[i] = v;
  }
}

Reconstruction reconstruct(const ObserverState& obs, const FilterState& filters, const FilterGains& g) {
  Reconstruction r{Vector(obs.layout.n), Vector(obs.layout.n)};
  reconstruct_into(obs, filters.data, g, r.xi, r.x);
  return r;
}

Vector error_decomposition(const Matrix& t_i_hat, std::span<const double> xi_hat, const Matrix& t_i,
                           std::span<const double> xi) {
  const Matrix t_tilde = t_i_hat - t_i;
  const Vector xi_tilde = sub(xi_hat, xi);
  return add(add(t_tilde * xi_tilde, t_i * xi_tilde), t_tilde * xi);
}

BaselineState BaselineState::make(std::size_t n, Vector eta0, double gamma, double eps_div) {
  if (!(gamma > 0.0)) throw std::invalid_argument("baseline: gamma must be positive");
  BaselineState s;
  s.n = n;
  s.eta_hat = std::move(eta0);
  s.gamma = gamma;
  s.eps_div = eps_div;
  return s;
}

namespace {

// Logs guard hits and sign crossings; returns false on a guard hit.
bool screen(const std::vector<Denominator>& dens, std::vector<Denominator>& last, double eps_div, double t,
            std::vector<SingularityEvent>& events) {
  // Events are edge-triggered: one guard event on entering |d| < eps_div, one
  // crossing event per sign change that jumps over the guard band.
  bool ok = true;
  for (const auto& d : dens) {
    const bool guarded = !(std::abs(d.value) >= eps_div);
    const Denominator* prev = nullptr;
    for (const auto& p : last)
      if (p.name == d.name) prev = &p;
    const bool prev_guarded = prev && !(std::abs(prev->value) >= eps_div);
    if (guarded) {
      ok = false;
      if (!prev_guarded) events.push_back({t, "baseline", d.name, d.value, "guard"});
    } else if (prev && !prev_guarded && (prev->value < 0.0) != (d.value < 0.0)) {
      events.push_back({t, "baseline", d.name, d.value, "crossing"});
    }
  }
  for (const auto& d : dens) {
    bool found = false;
    for (auto& prev : last) {
      if (prev.name == d.name) {
        prev.value = d.value;
        found = true;
      }
    }
    if (!found) last.push_back(d);
  }
  return ok;
}

}  // namespace

Reconstruction step_baseline(BaselineState& bl, const BaselineMaps& maps, std::span<const double> y,
                             double delta, std::span<const double> filters, const FilterGains& g,
                             double dt, double t, std::vector<SingularityEvent>& events) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_baseline: dt must be positive");
  const double rate = bl.gamma * delta * delta * dt;
  const double decay = std::exp(-rate);
  const double gain = rate > 0.0 ? -std::expm1(-rate) / (delta * delta) : bl.gamma * dt;
  for (std::size_t i = 0; i < bl.eta_hat.size(); ++i) {
    bl.eta_hat[i] = decay * bl.eta_hat[i] + gain * delta * y[i];
  }
  check_finite(bl.eta_hat, "baseline eta estimate", t + dt);

  const GuardedValue psi = maps.f_psi(bl.eta_hat);
  bool ok = screen(psi.denominators, bl.last_denominators, bl.eps_div, t + dt, events);
  GuardedValue theta;
  GuardedValue ti;
  if (ok) {
    theta = maps.f_theta(maps.l_ab * psi.value);
    ok = screen(theta.denominators, bl.last_denominators, bl.eps_div, t + dt, events);
  }
  if (ok) {
    ti = maps.t_i(theta.value);
    ok = screen(ti.denominators, bl.last_denominators, bl.eps_div, t + dt, events);
  }
  if (ok) {
    bl.psi_hat = psi.value;
    bl.theta_hat = theta.value;
    bl.t_i_hat = unvec(ti.value, bl.n, bl.n);
    bl.o_gamma_hat = maps.o_gamma(maps.l_gamma * psi.value);
    bl.have_maps = true;
  }

  Reconstruction r{Vector(bl.n, 0.0), Vector(bl.n, 0.0)};
  if (!bl.have_maps) return r;
  ObserverState view;
  view.layout.n = bl.n;
  view.kappa_hat = pack_kappa(bl.psi_hat, bl.o_gamma_hat, bl.t_i_hat);
  reconstruct_into(view, filters, g, r.xi, r.x);
  return r;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> values, double t0, double t1) {
  if (t.size() != values.size()) throw DimensionError("fit_decay: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    const double v = values[i];
    if (!(v > 0.0) || !std::isfinite(v)) break;
    xs.push_back(t[i]);
    ys.push_back(std::log(v));
  }
  DecayFit fit;
  fit.samples = xs.size();
  if (xs.size() < 2) return fit;
  const double nn = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= nn;
  my /= nn;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.rate = sxy / sxx;
  fit.intercept = my - fit.rate * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.rate * xs[i]);
    sse += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.residual = std::sqrt(sse / nn);
  return fit;
}

}  // namespace adaptobs
