#include "adaptobs/plant.hpp"

#include <cmath>

namespace adaptobs {

LinearPlant PlantModel::evaluate() const {
  LinearPlant p{a(theta), b(theta), d(theta), c};
  if (p.a.rows() != n || p.a.cols() != n || p.b.size() != n || p.d.size() != n || p.c.size() != n) {
    throw DimensionError("PlantModel: maps do not return order-n objects");
  }
  if (theta.size() != n_theta) throw DimensionError("PlantModel: theta has wrong length");
  return p;
}

LinearExosystem Exosystem::evaluate() const {
  LinearExosystem e{a_delta(rho), h};
  if (e.a.rows() != n_delta || e.a.cols() != n_delta || e.h.size() != n_delta) {
    throw DimensionError("Exosystem: maps do not return order-n_delta objects");
  }
  return e;
}

Matrix shift_matrix(std::size_t n) {
  Matrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  return a;
}

CanonicalForm build_canonical(const LinearPlant& plant) {
  const std::size_t n = plant.order();
  const Matrix o_inv = observability(plant.c, plant.a, n);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale *= std::max(norm(o_inv.row_vector(i)), 1e-300);
  const double det = determinant(o_inv);
  if (!(std::abs(det) > 1e-12 * scale)) {
    throw NotObservableError("not observable at theta: det of observability matrix is " +
                             std::to_string(det));
  }
  const Matrix o = inverse(o_inv);

  CanonicalForm cf;
  cf.o_n = o.col_vector(n - 1);
  cf.t_i = Matrix(n, n);
  Vector col = cf.o_n;
  // Columns are A^{n-1}O_n, ..., A O_n, O_n; fill from the right.
  for (std::size_t k = 0; k < n; ++k) {
    cf.t_i.set_col(n - 1 - k, col);
    col = plant.a * col;
  }
  cf.t = inverse(cf.t_i);
  cf.a0 = shift_matrix(n);
  cf.c0 = unit_vector(n, 0);
  cf.psi_a = (cf.t * plant.a * cf.t_i) * cf.c0;
  cf.psi_b = cf.t * plant.b;
  cf.psi_d = (cf.t * plant.d)[n - 1];
  return cf;
}

CanonicalForm build_canonical(const PlantModel& model) { return build_canonical(model.evaluate()); }

Vector disturbance_markov_parameters(const LinearPlant& plant) {
  const std::size_t n = plant.order();
  Vector m(n);
  Vector ak_d = plant.d;
  for (std::size_t k = 0; k < n; ++k) {
    m[k] = dot(plant.c, ak_d);
    ak_d = plant.a * ak_d;
  }
  return m;
}

bool has_full_disturbance_relative_degree(const LinearPlant& plant, double tol) {
  const Vector m = disturbance_markov_parameters(plant);
  for (std::size_t k = 0; k + 1 < m.size(); ++k)
    if (std::abs(m[k]) > tol) return false;
  return std::abs(m.back()) > tol;
}

bool exosystem_is_marginal(const LinearExosystem& exo, double tol) {
  for (const auto& l : eigenvalues(exo.a))
    if (std::abs(l.real()) >= tol) return false;
  return true;
}

PlantState initial_state(const PlantModel& model, const Exosystem& exo) {
  if (model.x0.size() != model.n) throw DimensionError("x0 must have length n");
  if (exo.x0.size() != exo.n_delta) throw DimensionError("x_delta0 must have length n_delta");
  return PlantState{model.x0, exo.x0, 0.0};
}

void plant_derivative(const LinearPlant& plant, const LinearExosystem& exo, double u,
                      std::span<const double> state, std::span<double> out) {
  const std::size_t n = plant.order();
  const std::size_t nd = exo.order();
  const auto x = state.first(n);
  const auto xd = state.subspan(n, nd);
  const double delta = dot(exo.h, xd);
  for (std::size_t i = 0; i < n; ++i) {
    double s = plant.b[i] * u + plant.d[i] * delta;
    for (std::size_t j = 0; j < n; ++j) s += plant.a(i, j) * x[j];
    out[i] = s;
  }
  for (std::size_t i = 0; i < nd; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < nd; ++j) s += exo.a(i, j) * xd[j];
    out[n + i] = s;
  }
}

double plant_output(const LinearPlant& plant, std::span<const double> x) { return dot(plant.c, x); }

double disturbance_output(const LinearExosystem& exo, std::span<const double> x_delta) {
  return dot(exo.h, x_delta);
}

PlantOutputs step_plant(const LinearPlant& plant, const LinearExosystem& exo, PlantState& state,
                        double u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_plant: dt must be positive");
  const std::size_t n = plant.order();
  Vector s = concat({state.x, state.x_delta});
  Rk4Workspace ws;
  rk4_step(std::span<double>(s), dt,
           [&](std::span<const double> in, std::span<double> out) {
             plant_derivative(plant, exo, u, in, out);
           },
           ws);
  check_finite(s, "plant state", state.t + dt);
  std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n), state.x.begin());
  std::copy(s.begin() + static_cast<std::ptrdiff_t>(n), s.end(), state.x_delta.begin());
  state.t += dt;
  return PlantOutputs{plant_output(plant, state.x), disturbance_output(exo, state.x_delta)};
}

Vector virtual_state(const CanonicalForm& cf, std::span<const double> x) { return cf.t * x; }

}  // namespace adaptobs
