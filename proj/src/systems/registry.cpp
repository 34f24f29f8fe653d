#include <cmath>
#include <numbers>

#include "contact/systems/models.hpp"

namespace contact::systems {

const std::vector<ModelInfo>& model_catalogue() {
  static const std::vector<ModelInfo> catalogue = {
      {"damped_oscillator",
       {{"alpha", 0.125}, {"q0", 1.0}, {"p0", 0.0}, {"s0", 0.0}},
       "H = p^2/2 + q^2/2 + alpha s"},
      {"perturbed_kepler",
       {{"alpha", -0.01}, {"Omega", 2 * std::numbers::pi}, {"gamma", 1.0}, {"e", 0.0}, {"collision_radius", 1e-6}, {"escape_radius", 100.0}},
       "H = |p|^2/2 - gamma/|q| + alpha sin(Omega t) s, periapsis start"},
      {"spin_orbit",
       {{"Ctilde", 1.0},
        {"lambda", 0.001},
        {"Omega", 1.0},
        {"nu", 1.0},
        {"BmA", 0.01},
        {"e", 0.01},
        {"a", 0.0},
        {"mu", 0.0},
        {"m_min", -8},
        {"m_max", 8},
        {"quad_points", 512},
        {"truncation_tolerance", 1e-14},
        {"theta0", 0.0},
        {"theta_dot0", 1.0}},
       "triaxial + tidal torques, C(t) = Ctilde + lambda cos(Omega t)"},
      {"lane_emden", {{"n", 1.0}}, "H = p^2/2 + y^(n+1)/(n+1) + (2/x) s"},
  };
  return catalogue;
}

namespace {

int as_int(double v, const char* key) {
  if (v != std::floor(v)) throw InvalidArgument(std::string("parameter ") + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

ModelDescriptor make_model(const std::string& name, const std::map<std::string, double>& parameters) {
  const ModelInfo* info = nullptr;
  for (const auto& entry : model_catalogue()) {
    if (entry.name == name) info = &entry;
  }
  if (!info) throw InvalidArgument("unknown model '" + name + "'");
  std::map<std::string, double> p = info->defaults;
  for (const auto& [key, value] : parameters) {
    if (!p.count(key)) throw InvalidArgument("model " + name + " has no parameter '" + key + "'");
    p[key] = value;
  }

  if (name == "damped_oscillator") {
    const State x0 = make_state<double>(Vec::Constant(1, p["q0"]), Vec::Constant(1, p["p0"]), p["s0"]);
    auto m = make_damped_oscillator(p["alpha"], x0);
    m.parameters = p;
    return m;
  }
  if (name == "perturbed_kepler") {
    KeplerParameters k;
    k.alpha = p["alpha"];
    k.Omega = p["Omega"];
    k.gamma = p["gamma"];
    k.eccentricity = p["e"];
    k.collision_radius = p["collision_radius"];
    k.escape_radius = p["escape_radius"];
    return make_perturbed_kepler(k);
  }
  if (name == "spin_orbit") {
    SpinOrbitParameters s;
    s.Ctilde = p["Ctilde"];
    s.lambda = p["lambda"];
    s.Omega = p["Omega"];
    s.nu = p["nu"];
    s.BmA = p["BmA"];
    s.eccentricity = p["e"];
    s.a = p["a"];
    s.mu = p["mu"];
    s.m_min = as_int(p["m_min"], "m_min");
    s.m_max = as_int(p["m_max"], "m_max");
    s.quad_points = as_int(p["quad_points"], "quad_points");
    s.truncation_tolerance = p["truncation_tolerance"];
    s.theta0 = p["theta0"];
    s.theta_dot0 = p["theta_dot0"];
    return make_spin_orbit(s);
  }
  return make_lane_emden(p["n"]);
}

}  // namespace contact::systems
