#include "adaptobs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptobs/errors.hpp"
#include "adaptobs/model.hpp"

namespace adaptobs {

using nlohmann::json;

std::string to_string(ObserverSelection s) {
  switch (s) {
    case ObserverSelection::Proposed:
      return "proposed";
    case ObserverSelection::Baseline:
      return "baseline";
    case ObserverSelection::Both:
      return "both";
  }
  return "both";
}

ObserverSelection parse_observers(const std::string& s) {
  if (s == "proposed") return ObserverSelection::Proposed;
  if (s == "baseline") return ObserverSelection::Baseline;
  if (s == "both") return ObserverSelection::Both;
  throw ConfigError("observers: expected proposed, baseline or both, got '" + s + "'");
}

void Scenario::validate() const {
  std::vector<std::string> bad;
  try {
    params.validate();
  } catch (const ConfigError& e) {
    bad = e.fields();
  }
  if (!ModelRegistry::instance().contains(model)) bad.push_back("model: unknown model '" + model + "'");
  if (decimation == 0) bad.push_back("decimation: must be >= 1");
  if (options.phi_stride == 0) bad.push_back("pipeline.phi_stride: must be >= 1");
  if (!(options.eps_norm >= 0.0)) bad.push_back("pipeline.eps_norm: must be >= 0");
  if (!(options.eps_div > 0.0)) bad.push_back("pipeline.eps_div: must be positive");
  if (!(options.k_min > 0.0) || !(options.k_max >= options.k_min)) {
    bad.push_back("pipeline.k_min/k_max: need 0 < k_min <= k_max");
  }
  if (!(options.fe_window > 0.0)) bad.push_back("pipeline.fe_window: must be positive");
  if (!(options.fe_alpha > 0.0)) bad.push_back("pipeline.fe_alpha: must be positive");
  if (params.dt > 0.0) {
    const double steps = params.t_eps / params.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) bad.push_back("t_eps: must be a multiple of dt");
  }
  if (!bad.empty()) throw ConfigError(bad);
}

std::string scenario_to_json(const Scenario& s) {
  const auto& p = s.params;
  const auto& o = s.options;
  json j = {
      {"model", s.model},
      {"theta", p.theta},
      {"rho", p.rho},
      {"f", p.f},
      {"K", p.k},
      {"sigma", p.sigma},
      {"t_eps", p.t_eps},
      {"gamma", p.gamma},
      {"dt", p.dt},
      {"t_end", p.t_end},
      {"x0", p.x0},
      {"x_delta0", p.x_delta0},
      {"seed", p.seed},
      {"control",
       {{"gain", p.control_gain},
        {"setpoint", p.setpoint},
        {"amplitude", p.excitation_amplitude},
        {"frequency", p.excitation_frequency},
        {"decay", p.excitation_decay},
        {"excitation", p.excitation}}},
      {"pipeline",
       {{"eps_k", o.eps_k},
        {"k_min", o.k_min},
        {"k_max", o.k_max},
        {"eps_norm", o.eps_norm},
        {"eps_div", o.eps_div},
        {"fe_window", o.fe_window},
        {"fe_alpha", o.fe_alpha},
        {"phi_stride", o.phi_stride},
        {"gauge", o.gauge}}},
      {"observers", to_string(s.observers)},
      {"output_dir", s.output_dir},
      {"decimation", s.decimation},
      {"dump_cascade_at", std::isnan(s.dump_cascade_at) ? json(nullptr) : json(s.dump_cascade_at)},
  };
  return j.dump(2);
}

namespace {

void check_keys(const json& user, const json& defaults, const std::string& prefix,
                std::vector<std::string>& bad) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) {
      bad.push_back(path + ": unknown key");
    } else if (it->is_object() && defaults[it.key()].is_object()) {
      check_keys(*it, defaults[it.key()], path, bad);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, std::vector<std::string>& bad, const std::string& prefix = "") {
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad.push_back((prefix.empty() ? std::string(key) : prefix + "." + key) + ": " + e.what());
  }
}

Scenario from_merged(const json& j) {
  Scenario s;
  std::vector<std::string> bad;
  auto& p = s.params;
  auto& o = s.options;
  read(j, "model", s.model, bad);
  read(j, "theta", p.theta, bad);
  read(j, "rho", p.rho, bad);
  read(j, "f", p.f, bad);
  read(j, "K", p.k, bad);
  read(j, "sigma", p.sigma, bad);
  read(j, "t_eps", p.t_eps, bad);
  read(j, "gamma", p.gamma, bad);
  read(j, "dt", p.dt, bad);
  read(j, "t_end", p.t_end, bad);
  read(j, "x0", p.x0, bad);
  read(j, "x_delta0", p.x_delta0, bad);
  read(j, "seed", p.seed, bad);
  const json& c = j.at("control");
  read(c, "gain", p.control_gain, bad, "control");
  read(c, "setpoint", p.setpoint, bad, "control");
  read(c, "amplitude", p.excitation_amplitude, bad, "control");
  read(c, "frequency", p.excitation_frequency, bad, "control");
  read(c, "decay", p.excitation_decay, bad, "control");
  read(c, "excitation", p.excitation, bad, "control");
  const json& q = j.at("pipeline");
  read(q, "eps_k", o.eps_k, bad, "pipeline");
  read(q, "k_min", o.k_min, bad, "pipeline");
  read(q, "k_max", o.k_max, bad, "pipeline");
  read(q, "eps_norm", o.eps_norm, bad, "pipeline");
  read(q, "eps_div", o.eps_div, bad, "pipeline");
  read(q, "fe_window", o.fe_window, bad, "pipeline");
  read(q, "fe_alpha", o.fe_alpha, bad, "pipeline");
  read(q, "phi_stride", o.phi_stride, bad, "pipeline");
  read(q, "gauge", o.gauge, bad, "pipeline");
  std::string observers = "both";
  read(j, "observers", observers, bad);
  try {
    s.observers = parse_observers(observers);
  } catch (const ConfigError& e) {
    bad.push_back(e.what());
  }
  read(j, "output_dir", s.output_dir, bad);
  read(j, "decimation", s.decimation, bad);
  if (!j.contains("dump_cascade_at") || j.at("dump_cascade_at").is_null()) {
    s.dump_cascade_at = std::numeric_limits<double>::quiet_NaN();
  } else {
    read(j, "dump_cascade_at", s.dump_cascade_at, bad);
  }
  if (!bad.empty()) throw ConfigError(bad);
  return s;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
  }
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  const json user = parse_text(text);
  if (!user.is_object()) throw ConfigError("scenario: top level must be a JSON object");
  json merged = json::parse(scenario_to_json(Scenario{}));
  std::vector<std::string> bad;
  check_keys(user, merged, "", bad);
  merged.merge_patch(user);
  // Report unknown keys together with type errors in the known ones.
  try {
    Scenario s = from_merged(merged);
    if (!bad.empty()) throw ConfigError(bad);
    s.validate();
    return s;
  } catch (const ConfigError& e) {
    if (bad.empty()) throw;
    for (const auto& f : e.fields())
      if (std::find(bad.begin(), bad.end(), f) == bad.end()) bad.push_back(f);
    throw ConfigError(bad);
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare strings such as observers=proposed
  }
  json patch = value;
  std::string path = key;
  for (auto dot = path.rfind('.'); dot != std::string::npos; dot = path.rfind('.')) {
    patch = json{{path.substr(dot + 1), patch}};
    path = path.substr(0, dot);
  }
  patch = json{{path, patch}};

  json merged = json::parse(scenario_to_json(s));
  std::vector<std::string> bad;
  check_keys(patch, merged, "", bad);
  if (!bad.empty()) throw ConfigError(bad);
  merged.merge_patch(patch);
  s = from_merged(merged);
  s.validate();
}

}  // namespace adaptobs
