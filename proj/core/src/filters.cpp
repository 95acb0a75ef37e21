#include "adaptobs/filters.hpp"

#include <stdexcept>

#include "adaptobs/integrator.hpp"

namespace adaptobs {

FilterGains make_filter_gains(std::span<const double> k, std::span<const double> f) {
  if (k.empty() || k.size() != f.size()) {
    throw std::invalid_argument("filter gains: K and f must be non-empty and of equal length");
  }
  FilterGains g;
  g.k.assign(k.begin(), k.end());
  g.f.assign(f.begin(), f.end());
  g.a_k = companion_left(k);
  g.a_f = companion_bottom(f);
  if (!is_hurwitz(g.a_k)) throw std::invalid_argument("filter gains: A_K is not Hurwitz");
  if (!is_hurwitz(g.a_f)) throw std::invalid_argument("filter gains: A_f is not Hurwitz");
  g.o_e = observability(unit_vector(k.size(), 0), g.a_k, k.size());
  g.o_e_inv = inverse(g.o_e);
  return g;
}

FilterState FilterState::zeros(std::size_t n) {
  FilterState s;
  s.layout.n = n;
  s.data.assign(s.layout.size(), 0.0);
  return s;
}

Matrix FilterState::block(std::size_t offset) const {
  const std::size_t n = layout.n;
  Matrix m(n, n);
  std::copy(data.begin() + static_cast<std::ptrdiff_t>(offset),
            data.begin() + static_cast<std::ptrdiff_t>(offset + n * n), m.data().begin());
  return m;
}

namespace {

// out = A m (+ diag(drive) when drive != 0), all n×n row-major.
void companion_times(const Matrix& a, const double* m, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * m[k * n + j];
      out[i * n + j] = s;
    }
}

}  // namespace

void filter_derivative(const FilterGains& g, double u, double y, std::span<const double> state,
                       std::span<double> out) {
  const std::size_t n = g.order();
  const FilterLayout L{n};
  const double* s = state.data();
  double* d = out.data();

  const double* z = s + L.z();
  for (std::size_t i = 0; i < n; ++i) {
    double v = g.k[i] * y;
    for (std::size_t k = 0; k < n; ++k) v += g.a_k(i, k) * z[k];
    d[L.z() + i] = v;
  }

  companion_times(g.a_k, s + L.p(), d + L.p(), n);
  companion_times(g.a_k, s + L.omega(), d + L.omega(), n);
  for (std::size_t i = 0; i < n; ++i) {
    d[L.p() + i * n + i] += u;
    d[L.omega() + i * n + i] += y;
  }

  const double* fs = s + L.f();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) v += g.a_f(i, k) * fs[k];
    d[L.f() + i] = v;
  }
  d[L.f() + n - 1] += y - z[0];

  companion_times(g.a_f, s + L.h(), d + L.h(), n);
  companion_times(g.a_f, s + L.nn(), d + L.nn(), n);
  // e_n C_0ᵀP and e_n C_0ᵀΩ: first rows of P and Ω feed the last rows.
  for (std::size_t j = 0; j < n; ++j) {
    d[L.h() + (n - 1) * n + j] += s[L.p() + j];
    d[L.nn() + (n - 1) * n + j] += s[L.omega() + j];
  }
}

void step_filters(FilterState& state, const FilterGains& g, double u, double y, double dt,
                  double t) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_filters: dt must be positive");
  Rk4Workspace ws;
  rk4_step(std::span<double>(state.data), dt,
           [&](std::span<const double> in, std::span<double> out) {
             filter_derivative(g, u, y, in, out);
           },
           ws);
  check_finite(state.data, "filter state", t + dt);
}

double extended_regressor_into(std::span<const double> state, const FilterGains& g, double y,
                               std::span<double> phi_e) {
  const std::size_t n = g.order();
  if (phi_e.size() != extended_dim(n)) throw DimensionError("phi_e has wrong length");
  const FilterLayout L{n};
  const double* s = state.data();
  const double* p = s + L.p();
  const double* om = s + L.omega();
  const double* fs = s + L.f();
  const double* h = s + L.h();
  const double* nm = s + L.nn();

  for (std::size_t j = 0; j < n; ++j) {
    double a = om[j];  // (ΩᵀC_0)_j = Ω_{0j}
    double b = p[j];
    for (std::size_t i = 0; i < n; ++i) {
      a += nm[i * n + j] * g.f[i];
      b += h[i * n + j] * g.f[i];
    }
    phi_e[j] = a;
    phi_e[n + j] = b;
    phi_e[2 * n + j] = fs[j];
  }
  // Column-major vec of the row-major blocks.
  std::size_t w = 3 * n;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) phi_e[w++] = nm[i * n + j];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) phi_e[w++] = h[i * n + j];

  double q = y - s[L.z()];
  for (std::size_t i = 0; i < n; ++i) q += g.f[i] * fs[i];
  return q;
}

ExtendedRegressor extended_regressor(const FilterState& state, const FilterGains& g, double y) {
  ExtendedRegressor r;
  r.phi_e.assign(extended_dim(g.order()), 0.0);
  r.q_bar = extended_regressor_into(state.data, g, y, r.phi_e);
  return r;
}

Vector true_eta_e(std::span<const double> psi_a, std::span<const double> psi_b,
                  std::span<const double> gamma) {
  if (psi_a.size() != psi_b.size() || psi_a.size() != gamma.size()) {
    throw DimensionError("true_eta_e: blocks must share length n");
  }
  const Vector ka = scaled(kron(psi_a, gamma), -1.0);
  const Vector kb = scaled(kron(psi_b, gamma), -1.0);
  return concat({psi_a, psi_b, gamma, ka, kb});
}

Vector gamma_spectrum_reference(const LinearExosystem& exo, std::size_t n) {
  const std::size_t nd = exo.order();
  if (n < nd) throw DimensionError("gamma_spectrum_reference: n must be >= n_delta");
  // det(sI − A_δ)·s^{n−n_δ}: shift the monic coefficients up by n − n_δ.
  const Vector c = characteristic_polynomial(exo.a);
  Vector gamma(n, 0.0);
  for (std::size_t i = 0; i < nd; ++i) gamma[i + (n - nd)] = -c[i];
  for (double& v : gamma)
    if (v == 0.0) v = 0.0;  // normalise -0
  return gamma;
}

Matrix o_gamma_matrix(std::span<const double> gamma, std::span<const double> f) {
  if (gamma.size() != f.size()) throw DimensionError("o_gamma_matrix: length mismatch");
  return observability(sub(gamma, f), companion_bottom(gamma), gamma.size());
}

Vector canonical_state_estimate(const FilterState& state, const FilterGains& g,
                                std::span<const double> psi_a, std::span<const double> psi_b,
                                const Matrix& o_gamma) {
  const Matrix om = state.omega();
  const Matrix p = state.p();
  const Matrix nm = state.n_mat();
  const Matrix h = state.h();
  const Vector inner = sub(sub(state.f_state(), nm * psi_a), h * psi_b);
  const Vector corr = g.o_e_inv * (o_gamma * inner);
  Vector xi = add(state.z(), om * psi_a);
  xi = add(xi, p * psi_b);
  return add(xi, corr);
}

}  // namespace adaptobs
