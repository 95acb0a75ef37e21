#include "adaptobs/hetero.hpp"

#include <cmath>

namespace adaptobs {

HeteroCheck check_heterogeneity(const HeteroMapping& m, std::mt19937_64& rng, std::size_t draws,
                                double omega_lo, double omega_hi, double x_abs) {
  std::uniform_real_distribution<double> omega_dist(omega_lo, omega_hi);
  std::uniform_real_distribution<double> x_dist(-x_abs, x_abs);
  HeteroCheck out;
  out.draws = draws;
  Vector x(m.arg_dim);
  for (std::size_t d = 0; d < draws; ++d) {
    const double w = omega_dist(rng);
    for (double& v : x) v = x_dist(rng);
    const Matrix pi = m.pi(w);
    const Matrix lhs = pi * m.reference(x);
    const Matrix rhs = m.transformed(w, scaled(x, w));
    const double err = (lhs - rhs).max_abs() / (1.0 + lhs.max_abs());
    out.max_rel_error = std::max(out.max_rel_error, err);
    if (determinant(pi) < std::pow(w, m.degree) * (1.0 - 1e-12)) out.det_bound_holds = false;
  }
  return out;
}

namespace {

template <class Y>
double gauge_factor(const Y& y, double m) {
  double s = std::abs(m);
  for (double v : y) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

void normalize_gauge(StageVector& s) {
  const double f = gauge_factor(s.y, s.m);
  if (!(f > 0.0) || !std::isfinite(f)) return;
  for (double& v : s.y) v /= f;
  s.m /= f;
  s.log_scale += std::log(f);
}

void normalize_gauge(StageMatrix& s) {
  const double f = gauge_factor(s.y.data(), s.m);
  if (!(f > 0.0) || !std::isfinite(f)) return;
  s.y *= 1.0 / f;
  s.m /= f;
  s.log_scale += std::log(f);
}

StageVector stage_psi(const Vector& y, double delta, const CascadeBundle& b, double log_scale) {
  const Matrix tg = b.t_g_psi(delta, y);
  const Vector ts = b.t_s_psi(delta, y);
  return StageVector{adjugate(tg) * ts, determinant(tg), b.degree_psi * log_scale};
}

StageMatrix stage_ogamma(const StageVector& psi, const CascadeBundle& b) {
  const Vector y_gamma = b.l_gamma * psi.y;
  const Matrix pi = b.pi_o_gamma(psi.m);
  return StageMatrix{adjugate(pi) * b.t_o_gamma(psi.m, y_gamma), determinant(pi),
                     b.degree_o_gamma * psi.log_scale};
}

StageVector stage_theta(const StageVector& psi, const CascadeBundle& b) {
  const Vector y_ab = b.l_ab * psi.y;
  const Matrix tg = b.t_g_theta(psi.m, y_ab);
  const Vector ts = b.t_s_theta(psi.m, y_ab);
  return StageVector{adjugate(tg) * ts, determinant(tg), b.degree_theta * psi.log_scale};
}

StageMatrix stage_ti(const StageVector& theta, const CascadeBundle& b) {
  const Matrix tp = b.t_p(theta.m, theta.y);
  const Matrix tq = b.t_q(theta.m, theta.y);
  return StageMatrix{adjugate(tp) * tq, determinant(tp), b.degree_ti * theta.log_scale};
}

KappaRegression stack_kappa(const StageVector& psi, const StageMatrix& o_gamma,
                            const StageMatrix& t_i, std::size_t n) {
  const double a = psi.m;
  const double b = o_gamma.m;
  const double c = t_i.m;
  KappaRegression k;
  k.y = concat({scaled(psi.y, b * c), scaled(vec(o_gamma.y), a * c), scaled(vec(t_i.y), a * b)});
  k.m = a * b * c;
  if (a == 0.0 || b == 0.0 || c == 0.0) return k;
  const double na = static_cast<double>(3 * n);
  const double nb = static_cast<double>(n * n);
  k.log_abs_m_kappa = na * (std::log(std::abs(a)) + psi.log_scale) +
                      nb * (std::log(std::abs(b)) + o_gamma.log_scale) +
                      nb * (std::log(std::abs(c)) + t_i.log_scale);
  const auto odd_negative = [](double v, std::size_t p) { return v < 0.0 && p % 2 == 1; };
  const bool neg = odd_negative(a, 3 * n) != (odd_negative(b, n * n) != odd_negative(c, n * n));
  k.sign_m_kappa = neg ? -1 : 1;
  return k;
}

RawKappa stack_kappa_direct(const StageVector& psi, const StageMatrix& o_gamma,
                            const StageMatrix& t_i, std::size_t n) {
  const double a = psi.m * std::exp(psi.log_scale);
  const double b = o_gamma.m * std::exp(o_gamma.log_scale);
  const double c = t_i.m * std::exp(t_i.log_scale);
  Vector diag;
  diag.insert(diag.end(), 3 * n, a);
  diag.insert(diag.end(), n * n, b);
  diag.insert(diag.end(), n * n, c);
  const Matrix bd = Matrix::diagonal(diag);
  const Vector stacked =
      concat({scaled(psi.y, std::exp(psi.log_scale)), scaled(vec(o_gamma.y), std::exp(o_gamma.log_scale)),
              scaled(vec(t_i.y), std::exp(t_i.log_scale))});
  return RawKappa{adjugate(bd) * stacked, determinant(bd)};
}

CascadeOutput run_cascade(const Vector& y, double delta, const CascadeBundle& b,
                          const CascadeOptions& opt) {
  CascadeOutput out;
  StageVector input{y, delta, 0.0};
  if (opt.gauge) normalize_gauge(input);
  out.psi = stage_psi(input.y, input.m, b, input.log_scale);
  if (opt.gauge) normalize_gauge(out.psi);
  out.o_gamma = stage_ogamma(out.psi, b);
  if (opt.gauge) normalize_gauge(out.o_gamma);
  out.theta = stage_theta(out.psi, b);
  if (opt.gauge) normalize_gauge(out.theta);
  out.t_i = stage_ti(out.theta, b);
  if (opt.gauge) normalize_gauge(out.t_i);
  out.kappa = stack_kappa(out.psi, out.o_gamma, out.t_i, b.n);
  return out;
}

NormalizedRegression normalize_regression(const KappaRegression& k, double eps) {
  NormalizedRegression r{Vector(k.y.size(), 0.0), 0.0};
  const double den = std::abs(k.m) + eps * norm(k.y);
  if (!(den > 0.0) || !std::isfinite(den)) return r;
  r.m = k.m / den;
  for (std::size_t i = 0; i < k.y.size(); ++i) r.y[i] = k.y[i] / den;
  return r;
}

}  // namespace adaptobs
