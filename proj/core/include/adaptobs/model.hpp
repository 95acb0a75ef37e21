#pragma once

// Named model plug-ins. A model turns a parameter block into everything the
// pipeline needs: plant and disturbance ground truth, filter gains, the
// reduction, the cascade mappings, the baseline inverse maps and the
// reference values used to score the estimates.

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "adaptobs/drem.hpp"
#include "adaptobs/example_system.hpp"
#include "adaptobs/filters.hpp"
#include "adaptobs/hetero.hpp"
#include "adaptobs/observers.hpp"
#include "adaptobs/plant.hpp"

namespace adaptobs {

struct ModelInstance {
  std::string name;
  ExampleConfig config;
  PlantModel plant;
  Exosystem exosystem;
  FilterGains gains;
  Reduction reduction;
  CascadeBundle bundle;
  BaselineMaps baseline;
  std::function<double(double t, double y)> control;

  // Ground truth for scoring only.
  CanonicalForm canonical;
  Vector true_eta_e;
  Vector true_eta;
  Vector true_kappa;
  Vector true_theta;
};

using ModelFactory = std::function<ModelInstance(const ExampleConfig&)>;

class ModelRegistry {
 public:
  static ModelRegistry& instance();

  void add(const std::string& name, ModelFactory factory);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  /// Throws ConfigError for an unknown name or invalid parameters.
  ModelInstance create(const std::string& name, const ExampleConfig& cfg) const;

 private:
  ModelRegistry();
  mutable std::mutex mutex_;
  std::map<std::string, ModelFactory> factories_;
};

inline constexpr const char* kPaperExample = "paper-example";

ModelInstance make_paper_example(const ExampleConfig& cfg);

struct ModelCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Observability, disturbance relative degree, marginal exosystem, Hurwitz
/// filters, reduction consistency, cascade oracle and heterogeneity identities.
std::vector<ModelCheck> check_model(const ModelInstance& m, std::uint64_t seed = 1);

}  // namespace adaptobs
