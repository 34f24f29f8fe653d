#include <cmath>
#include <optional>

#include "contact/systems/models.hpp"

namespace contact::systems {

namespace {

// y^k with a domain check for fractional exponents.
double power(double y, double k) {
  if (y < 0 && k != std::floor(k)) throw DomainError("lane-emden: y < 0 with a fractional power");
  if (k == 0) return 1.0;
  return std::pow(y, k);
}

std::optional<std::pair<std::function<double(double)>, std::function<double(double)>>> exact_profile(double n) {
  using Fn = std::function<double(double)>;
  if (n == 0) {
    return std::make_pair(Fn([](double x) { return 1 - x * x / 6; }), Fn([](double x) { return -x / 3; }));
  }
  if (n == 1) {
    return std::make_pair(Fn([](double x) { return std::abs(x) < 1e-4 ? 1 - x * x / 6 + x * x * x * x / 120 : std::sin(x) / x; }),
                          Fn([](double x) {
                            return std::abs(x) < 1e-4 ? -x / 3 + x * x * x / 30 : (x * std::cos(x) - std::sin(x)) / (x * x);
                          }));
  }
  if (n == 5) {
    return std::make_pair(Fn([](double x) { return 1 / std::sqrt(1 + x * x / 3); }),
                          Fn([](double x) { return -x / 3 * std::pow(1 + x * x / 3, -1.5); }));
  }
  return std::nullopt;
}

}  // namespace

ModelDescriptor make_lane_emden(double n) {
  if (!(n >= 0) || !std::isfinite(n)) throw InvalidArgument("lane-emden: index must be >= 0");
  ModelDescriptor m;
  m.name = "lane_emden";
  m.dim = 1;
  m.parameters = {{"n", n}};
  System& sys = m.system;
  sys.dim = 1;
  sys.potential = [n](const Vec& y, double) { return power(y(0), n + 1) / (n + 1); };
  sys.gradient = [n](const Vec& y, double) -> Vec { return Vec::Constant(1, power(y(0), n)); };
  sys.damping = [](double x) { return 2 / x; };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double) { return 0.0; };
  d2.hessian = [n](const Vec& y, double) -> Matrix<double> {
    return Matrix<double>::Constant(1, 1, n == 0 ? 0.0 : n * power(y(0), n - 1));
  };
  d2.dgrad_dt = [](const Vec&, double) -> Vec { return Vec::Zero(1); };
  d2.d2V_dt2 = [](const Vec&, double) { return 0.0; };
  d2.df_dt = [](double x) { return -2 / (x * x); };
  d2.d2f_dt2 = [](double x) { return 4 / (x * x * x); };
  sys.second = d2;
  m.initial = make_state<double>(Vec::Constant(1, 1.0), Vec::Constant(1, 0.0));
  m.angular = {false};
  m.singular_at_start = true;

  if (auto profile = exact_profile(n)) {
    auto [y, dy] = *profile;
    // (x^2 s)' = x^2 (p^2/2 - V(y)) with s(0) = 0.
    m.exact = [n, y, dy](double x) {
      State out;
      out.q = Vec::Constant(1, y(x));
      out.p = Vec::Constant(1, dy(x));
      out.t = x;
      if (x == 0) {
        out.s = 0;
      } else {
        const double integral = gauss_legendre(
            [&](double u) {
              const double yu = y(u), pu = dy(u);
              return u * u * (pu * pu / 2 - power(yu, n + 1) / (n + 1));
            },
            0.0, x);
        out.s = integral / (x * x);
      }
      return out;
    };
  }
  return m;
}

}  // namespace contact::systems
