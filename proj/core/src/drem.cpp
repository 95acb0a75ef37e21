#include "adaptobs/drem.hpp"

#include <algorithm>
#include <cmath>

namespace adaptobs {

void Reduction::validate() const {
  if (l_eta.rows() != d_eta.cols() || l_eta.cols() != d_eta.rows()) {
    throw DimensionError("Reduction: D_eta and L_eta shapes disagree");
  }
  if (!(reduced_dim() < extended_dim())) throw DimensionError("Reduction: n_eta must be < n_e");
}

void reduce_into(std::span<const double> phi_e, const Reduction& r, std::span<double> phi_bar) {
  const Matrix& d = r.d_eta;
  if (phi_e.size() != d.rows() || phi_bar.size() != d.cols()) {
    throw DimensionError("reduce: regressor length does not match D_eta");
  }
  std::fill(phi_bar.begin(), phi_bar.end(), 0.0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const double v = phi_e[i];
    if (v == 0.0) continue;
    for (std::size_t j = 0; j < d.cols(); ++j) phi_bar[j] += d(i, j) * v;
  }
}

ReducedRegression reduce(std::span<const double> phi_e, double q_bar, const Reduction& r) {
  ReducedRegression out{Vector(r.reduced_dim(), 0.0), q_bar};
  reduce_into(phi_e, r, out.phi_bar);
  return out;
}

DremState DremState::make(std::size_t n_eta, const DremConfig& cfg) {
  DremState s;
  s.config = cfg;
  s.q.assign(n_eta, 0.0);
  s.phi = Matrix(n_eta, n_eta);
  s.prev_phi_bar.assign(n_eta, 0.0);
  return s;
}

void step_extension(DremState& s, std::span<const double> phi_bar, double q_bar, double t) {
  const std::size_t n = s.q.size();
  if (phi_bar.size() != n) throw DimensionError("step_extension: regressor length mismatch");
  if (t < s.config.t_eps) throw SequencingError("step_extension called before t_eps");
  const double w = std::exp(-s.config.sigma * (t - s.config.t_eps));
  if (s.started) {
    const double h = t - s.t_last;
    if (!(h > 0.0)) throw SequencingError("step_extension: time must advance");
    const double a = 0.5 * h * s.prev_weight;
    const double b = 0.5 * h * w;
    const auto& pp = s.prev_phi_bar;
    for (std::size_t i = 0; i < n; ++i) {
      s.q[i] += a * pp[i] * s.prev_q_bar + b * phi_bar[i] * q_bar;
      for (std::size_t j = i; j < n; ++j) {
        const double v = s.phi(i, j) + a * pp[i] * pp[j] + b * phi_bar[i] * phi_bar[j];
        s.phi(i, j) = v;
        s.phi(j, i) = v;
      }
    }
  }
  std::copy(phi_bar.begin(), phi_bar.end(), s.prev_phi_bar.begin());
  s.prev_q_bar = q_bar;
  s.prev_weight = w;
  s.t_last = t;
  s.started = true;
}

double mixing_gain(double det_phi, const DremConfig& cfg) {
  const double raw = 1.0 / (det_phi + cfg.eps_k);
  if (!std::isfinite(raw) || raw <= 0.0) return cfg.k_max;
  return std::clamp(raw, cfg.k_min, cfg.k_max);
}

MixedRegression mix_with_gain(const DremState& s, double k) {
  MixedRegression m;
  m.det_phi = determinant(s.phi);
  m.k = k;
  m.delta = k * m.det_phi;
  m.y = scaled(adjugate(s.phi) * s.q, k);
  m.excited = m.det_phi != 0.0;
  return m;
}

MixedRegression mix(const DremState& s) {
  return mix_with_gain(s, mixing_gain(determinant(s.phi), s.config));
}

ExcitationSeries excitation_level(std::span<const double> times, const std::vector<Vector>& phi_bar,
                                  double window, std::size_t stride) {
  if (!(window > 0.0)) throw std::invalid_argument("excitation_level: window must be positive");
  if (times.size() != phi_bar.size()) throw DimensionError("excitation_level: trace length mismatch");
  if (times.empty() || times.back() - times.front() < window) {
    throw std::invalid_argument("excitation_level: window longer than trace");
  }
  stride = std::max<std::size_t>(stride, 1);
  const std::size_t n = phi_bar.front().size();
  ExcitationSeries out;
  Matrix gram(n, n);
  std::size_t end = 0;
  for (std::size_t start = 0; start < times.size(); start += stride) {
    const double t_stop = times[start] + window;
    if (t_stop > times.back() + 1e-12) break;
    end = std::max(end, start);
    while (end + 1 < times.size() && times[end] < t_stop - 1e-12) ++end;
    gram = Matrix(n, n);
    for (std::size_t k = start; k < end; ++k) {
      const double h = 0.5 * (times[k + 1] - times[k]);
      const Vector& a = phi_bar[k];
      const Vector& b = phi_bar[k + 1];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) gram(i, j) += h * (a[i] * a[j] + b[i] * b[j]);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);
    out.t.push_back(times[start]);
    out.lambda_min.push_back(std::max(0.0, min_symmetric_eigenvalue(gram)));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> find_regressor_equalities(
    const std::vector<Vector>& phi_e, double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (phi_e.empty()) return pairs;
  const std::size_t n = phi_e.front().size();
  Vector scale(n, 0.0);
  for (const auto& row : phi_e)
    for (std::size_t i = 0; i < n; ++i) scale[i] = std::max(scale[i], std::abs(row[i]));
  for (std::size_t i = 0; i < n; ++i) {
    if (scale[i] == 0.0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (scale[j] == 0.0) continue;
      const double lim = tol * (1.0 + std::max(scale[i], scale[j]));
      bool equal = true;
      for (const auto& row : phi_e) {
        if (std::abs(row[i] - row[j]) > lim) {
          equal = false;
          break;
        }
      }
      if (equal) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

}  // namespace adaptobs
