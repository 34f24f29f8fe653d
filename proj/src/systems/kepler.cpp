#include <cmath>
#include <sstream>

#include "contact/systems/models.hpp"

namespace contact::systems {

State kepler_periapsis_state(double eccentricity, double gamma) {
  if (!(eccentricity >= 0 && eccentricity < 1)) throw InvalidArgument("kepler: eccentricity must lie in [0, 1)");
  Vec q(2), p(2);
  q << 1 - eccentricity, 0;
  p << 0, std::sqrt(gamma * (1 + eccentricity) / (1 - eccentricity));
  return make_state<double>(q, p);
}

ModelDescriptor make_perturbed_kepler(const KeplerParameters& params) {
  if (!(params.gamma > 0)) throw InvalidArgument("kepler: gamma must be positive");
  if (!(params.collision_radius >= 0)) throw InvalidArgument("kepler: collision radius must be non-negative");
  if (!(params.escape_radius > params.collision_radius)) {
    throw InvalidArgument("kepler: escape radius must exceed the collision radius");
  }
  const double alpha = params.alpha, Omega = params.Omega, gamma = params.gamma;
  const double r_min = params.collision_radius;

  auto radius = [r_min](const Vec& q) {
    const double r = q.norm();
    if (r < r_min) {
      std::ostringstream msg;
      msg << "collision: |q| = " << r << " below radius " << r_min;
      throw CollisionError(msg.str());
    }
    return r;
  };

  ModelDescriptor m;
  m.name = "perturbed_kepler";
  m.dim = 2;
  m.parameters = {{"alpha", alpha},
                  {"Omega", Omega},
                  {"gamma", gamma},
                  {"e", params.eccentricity},
                  {"collision_radius", r_min},
                  {"escape_radius", params.escape_radius}};
  System& sys = m.system;
  sys.dim = 2;
  sys.potential = [gamma, radius](const Vec& q, double) { return -gamma / radius(q); };
  sys.gradient = [gamma, radius](const Vec& q, double) -> Vec {
    const double r = radius(q);
    return gamma * q / (r * r * r);
  };
  sys.damping = [alpha, Omega](double t) { return alpha * std::sin(Omega * t); };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double) { return 0.0; };
  d2.hessian = [gamma, radius](const Vec& q, double) -> Matrix<double> {
    const double r = radius(q);
    const double r3 = r * r * r;
    return gamma * (Matrix<double>::Identity(2, 2) / r3 - 3 * q * q.transpose() / (r3 * r * r));
  };
  d2.dgrad_dt = [](const Vec&, double) -> Vec { return Vec::Zero(2); };
  d2.d2V_dt2 = [](const Vec&, double) { return 0.0; };
  d2.df_dt = [alpha, Omega](double t) { return alpha * Omega * std::cos(Omega * t); };
  d2.d2f_dt2 = [alpha, Omega](double t) { return -alpha * Omega * Omega * std::sin(Omega * t); };
  sys.second = d2;
  m.initial = kepler_periapsis_state(params.eccentricity, gamma);
  m.angular = {false, false};
  m.escape = [R = params.escape_radius](const State& x) -> std::string {
    const double r = x.q.norm();
    if (r <= R) return {};
    std::ostringstream msg;
    msg << "escape: |q| = " << r << " beyond radius " << R;
    return msg.str();
  };
  return m;
}

}  // namespace contact::systems
