#include "contact/harness/integrators.hpp"

#include <charconv>
#include <memory>

#include "contact/error_analysis.hpp"
#include "contact/splitting.hpp"
#include "contact/variational.hpp"

namespace contact::harness {

namespace {

constexpr const char* kExactPrefix = "contact-yoshida-exact-";

// Parses contact-yoshida-exact-<2k>; returns 0 when the name does not match.
int exact_order(const std::string& name) {
  const std::string prefix = kExactPrefix;
  if (name.rfind(prefix, 0) != 0) return 0;
  const std::string digits = name.substr(prefix.size());
  int order = 0;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), order);
  if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size()) return 0;
  if (order < 2 || order % 2 != 0 || order > 20) return 0;
  return order;
}

Stepper composed(const System& sys, double tau, CompositionScheme<double> scheme) {
  scheme.validate();
  return [sys, tau, scheme](const State& x) { return step_composed(sys, x, tau, scheme); };
}

Stepper herglotz(DiscreteLagrangian<double> Ld, double tau) {
  auto integrator = std::make_shared<HerglotzIntegrator<double>>(std::move(Ld), tau);
  return [integrator](const State& x) { return (*integrator)(x); };
}

}  // namespace

const std::vector<IntegratorInfo>& integrator_catalogue() {
  static const std::vector<IntegratorInfo> catalogue = {
      {"contact-s2", 2, true, "symmetric splitting, kinetic drift outermost"},
      {"contact-yoshida-exact-<2k>", 0, true, "recursive triple jump of contact-s2, any even order"},
      {"contact-yoshida-6A", 6, true, "sixth-order composition, coefficient set A"},
      {"contact-yoshida-6B", 6, true, "sixth-order composition, coefficient set B"},
      {"contact-yoshida-6C", 6, true, "sixth-order composition, coefficient set C"},
      {"herglotz-2", 2, true, "variational, linear q and Heun's method in s"},
      {"galerkin-4", 4, true, "variational, quadratic q and RK4 in s"},
      {"rk4", 4, false, "classical Runge-Kutta on (q, p, s)"},
  };
  return catalogue;
}

IntegratorInfo integrator_info(const std::string& name) {
  if (const int order = exact_order(name)) {
    return {name, order, true, "recursive triple jump of contact-s2"};
  }
  for (const auto& info : integrator_catalogue()) {
    if (info.name == name && info.order > 0) return info;
  }
  throw InvalidArgument("unknown integrator '" + name + "'");
}

bool is_known_integrator(const std::string& name) {
  try {
    integrator_info(name);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

Stepper make_stepper(const std::string& name, const System& sys, double tau) {
  if (!(tau > 0)) throw InvalidArgument("step size must be positive");
  if (name == "contact-s2") return [sys, tau](const State& x) { return step_s2(sys, x, tau); };
  if (const int order = exact_order(name)) return composed(sys, tau, yoshida_exact_of_order<double>(order));
  if (name == "contact-yoshida-6A") return composed(sys, tau, yoshida_table<double>(YoshidaTable::A));
  if (name == "contact-yoshida-6B") return composed(sys, tau, yoshida_table<double>(YoshidaTable::B));
  if (name == "contact-yoshida-6C") return composed(sys, tau, yoshida_table<double>(YoshidaTable::C));
  if (name == "herglotz-2") return herglotz(trapezoid_discrete_lagrangian(lagrangian_of(sys)), tau);
  if (name == "galerkin-4") return herglotz(galerkin4_discrete_lagrangian(lagrangian_of(sys)), tau);
  if (name == "rk4") return [sys, tau](const State& x) { return rk4_step(sys, x, tau); };
  throw InvalidArgument("unknown integrator '" + name + "'");
}

}  // namespace contact::harness
