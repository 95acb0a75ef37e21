#include "adaptobs/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "adaptobs/errors.hpp"

namespace adaptobs {

ModelRegistry::ModelRegistry() { factories_[kPaperExample] = make_paper_example; }

ModelRegistry& ModelRegistry::instance() {
  static ModelRegistry registry;
  return registry;
}

void ModelRegistry::add(const std::string& name, ModelFactory factory) {
  std::lock_guard lock(mutex_);
  factories_[name] = std::move(factory);
}

bool ModelRegistry::contains(const std::string& name) const {
  std::lock_guard lock(mutex_);
  return factories_.count(name) != 0;
}

std::vector<std::string> ModelRegistry::names() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [k, v] : factories_) out.push_back(k);
  return out;
}

ModelInstance ModelRegistry::create(const std::string& name, const ExampleConfig& cfg) const {
  ModelFactory factory;
  {
    std::lock_guard lock(mutex_);
    auto it = factories_.find(name);
    if (it == factories_.end()) throw ConfigError("model: unknown model '" + name + "'");
    factory = it->second;
  }
  return factory(cfg);
}

ModelInstance make_paper_example(const ExampleConfig& cfg) {
  cfg.validate();
  ModelInstance m;
  m.name = kPaperExample;
  m.config = cfg;
  m.plant = example_plant(cfg);
  m.exosystem = example_exosystem(cfg);
  try {
    m.gains = make_filter_gains(cfg.k, cfg.f);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("K/f: ") + e.what());
  }
  m.reduction = example_reduction();
  m.bundle = example_bundle(cfg);
  m.baseline = example_baseline_maps(cfg);
  m.control = [cfg](double t, double y) { return example_control(t, y, cfg); };
  m.canonical = build_canonical(m.plant);
  const Vector psi = example_psi(cfg.theta, cfg.rho);
  m.true_eta_e = true_eta_e(std::span(psi).subspan(0, 3), std::span(psi).subspan(3, 3),
                            std::span(psi).subspan(6, 3));
  m.true_eta = example_eta(cfg.theta, cfg.rho);
  m.true_kappa = example_true_kappa(cfg);
  m.true_theta = cfg.theta;
  return m;
}

namespace {

ModelCheck make_check(std::string name, bool ok, const std::string& detail) {
  return ModelCheck{std::move(name), ok, detail};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

std::vector<ModelCheck> check_model(const ModelInstance& m, std::uint64_t seed) {
  std::vector<ModelCheck> out;
  const LinearPlant plant = m.plant.evaluate();
  const LinearExosystem exo = m.exosystem.evaluate();
  const std::size_t n = plant.order();

  try {
    const CanonicalForm cf = build_canonical(plant);
    const double err = (cf.t_i * cf.t - Matrix::identity(n)).max_abs();
    out.push_back(make_check("observability", err < 1e-9, "|T_I T - I| = " + fmt(err)));
  } catch (const NotObservableError& e) {
    out.push_back(make_check("observability", false, e.what()));
  }
  out.push_back(make_check("disturbance relative degree", has_full_disturbance_relative_degree(plant),
                           "C^T A^k D for k < n vanish, k = n-1 does not"));
  out.push_back(make_check("marginal exosystem", exosystem_is_marginal(exo), "|Re lambda(A_delta)| < 1e-6"));
  out.push_back(make_check("Hurwitz filters", is_hurwitz(m.gains.a_k) && is_hurwitz(m.gains.a_f),
                           "A_K and A_f"));

  const Vector gamma = gamma_spectrum_reference(exo, n);
  const Vector psi = concat({m.canonical.psi_a, m.canonical.psi_b, gamma});
  const double psi_err = norm_inf(sub(psi, std::span(m.true_kappa).first(3 * n)));
  out.push_back(make_check("canonical form matches closed form", psi_err < 1e-9, "max err " + fmt(psi_err)));

  const Vector eta = m.reduction.l_eta * m.true_eta_e;
  const double eta_err = norm_inf(sub(eta, m.true_eta));
  out.push_back(make_check("reduction L_eta eta_e", eta_err < 1e-9, "max err " + fmt(eta_err)));

  const CascadeOutput c = run_cascade(m.true_eta, 1.0, m.bundle);
  double rel = 0.0;
  for (std::size_t i = 0; i < m.true_kappa.size(); ++i) {
    rel = std::max(rel, std::abs(c.kappa.y[i] / c.kappa.m - m.true_kappa[i]) / (1.0 + std::abs(m.true_kappa[i])));
  }
  out.push_back(make_check("cascade oracle", c.kappa.m != 0.0 && rel < 1e-9, "max rel err " + fmt(rel)));

  std::mt19937_64 rng(seed);
  for (const auto& map : m.bundle.mappings) {
    const HeteroCheck h = check_heterogeneity(map, rng, 1000);
    out.push_back(make_check("heterogeneity " + map.name, h.max_rel_error < 1e-9 && h.det_bound_holds,
                             "max rel err " + fmt(h.max_rel_error)));
  }
  return out;
}

}  // namespace adaptobs
