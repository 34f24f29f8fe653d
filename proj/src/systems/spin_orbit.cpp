#include <algorithm>
#include <cmath>
#include <numbers>

#include "contact/systems/models.hpp"

namespace contact::systems {

double solve_kepler_equation(double mean_anomaly, double eccentricity) {
  if (!(eccentricity >= 0 && eccentricity < 1)) throw InvalidArgument("kepler equation: eccentricity must lie in [0, 1)");
  double E = eccentricity < 0.8 ? mean_anomaly : std::numbers::pi;
  for (int it = 0; it < 100; ++it) {
    const double residual = E - eccentricity * std::sin(E) - mean_anomaly;
    const double step = residual / (1 - eccentricity * std::cos(E));
    E -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(E))) return E;
  }
  throw NonConvergence("kepler equation did not converge", 0.0);
}

namespace {

// (1/N) sum_k (a/r)^3 cos(2 f_k - m M_k) on the uniform mean-anomaly grid.
std::vector<double> project(double e, int m_lo, int m_hi, int quad_points) {
  std::vector<double> sums(static_cast<std::size_t>(m_hi - m_lo + 1), 0.0);
  const double root_plus = std::sqrt(1 + e), root_minus = std::sqrt(1 - e);
  for (int k = 0; k < quad_points; ++k) {
    const double M = 2 * std::numbers::pi * k / quad_points;
    const double E = solve_kepler_equation(M, e);
    const double a_over_r = 1 / (1 - e * std::cos(E));
    const double f = 2 * std::atan2(root_plus * std::sin(E / 2), root_minus * std::cos(E / 2));
    const double weight = a_over_r * a_over_r * a_over_r;
    for (int m = m_lo; m <= m_hi; ++m) sums[m - m_lo] += weight * std::cos(2 * f - m * M);
  }
  for (double& s : sums) s /= quad_points;
  return sums;
}

}  // namespace

double CayleyTable::coefficient(int m) const {
  if (m < m_min || m > m_max || m == 0) return 0.0;
  return values[static_cast<std::size_t>(m - m_min)];
}

std::vector<int> CayleyTable::active() const {
  std::vector<int> out;
  for (int m = m_min; m <= m_max; ++m) {
    if (m != 0 && std::abs(coefficient(m)) >= truncation_tolerance) out.push_back(m);
  }
  return out;
}

CayleyTable cayley_coefficients(double eccentricity, int m_min, int m_max, int quad_points,
                                double truncation_tolerance) {
  if (!(eccentricity >= 0 && eccentricity < 1)) throw InvalidArgument("cayley: eccentricity must lie in [0, 1)");
  if (quad_points < 256) throw InvalidArgument("cayley: at least 256 quadrature points are required");
  if (m_min > m_max) throw InvalidArgument("cayley: empty index range");

  // Four extra harmonics on each side feed the tail certificate.
  constexpr int kGuard = 4;
  const auto sums = project(eccentricity, m_min - kGuard, m_max + kGuard, quad_points);

  CayleyTable table;
  table.eccentricity = eccentricity;
  table.m_min = m_min;
  table.m_max = m_max;
  table.quad_points = quad_points;
  table.truncation_tolerance = truncation_tolerance;
  table.values.assign(static_cast<std::size_t>(m_max - m_min + 1), 0.0);
  double tail = 0.0;
  for (int m = m_min - kGuard; m <= m_max + kGuard; ++m) {
    const double w = sums[static_cast<std::size_t>(m - m_min + kGuard)];
    if (m == 0) continue;
    if (m < m_min || m > m_max || std::abs(w) < truncation_tolerance) {
      tail += std::abs(w);
      if (m < m_min || m > m_max) continue;
    }
    table.values[static_cast<std::size_t>(m - m_min)] = w;
  }
  table.tail_estimate = tail;
  return table;
}

ModelDescriptor make_spin_orbit(const SpinOrbitParameters& params) {
  return make_spin_orbit(params, cayley_coefficients(params.eccentricity, params.m_min, params.m_max,
                                                     params.quad_points, params.truncation_tolerance));
}

ModelDescriptor make_spin_orbit(const SpinOrbitParameters& params, const CayleyTable& table) {
  const double Ct = params.Ctilde, lambda = params.lambda, Omega = params.Omega;
  if (!(std::abs(lambda) < Ct)) throw InvalidArgument("spin-orbit: need |lambda| < Ctilde so that C(t) > 0");
  if (table.eccentricity != params.eccentricity) throw InvalidArgument("spin-orbit: Cayley table eccentricity mismatch");

  const double K = 1.5 * params.nu * params.BmA;
  const double a = params.a, mu = params.mu;

  std::vector<int> ms;
  std::vector<double> ws;
  for (int m : table.active()) {
    ms.push_back(m);
    ws.push_back(table.coefficient(m));
  }

  // Series sum_m W m^k {sin, cos}(2 theta - m t).
  struct Sums {
    double sin0 = 0, cos0 = 0, sin1 = 0, cos1 = 0, cos2 = 0;
  };
  auto series = [ms, ws](double theta, double t) {
    Sums s;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double m = ms[i], w = ws[i];
      const double phase = 2 * theta - m * t;
      const double sn = std::sin(phase), cs = std::cos(phase);
      s.sin0 += w * sn;
      s.cos0 += w * cs;
      s.sin1 += w * m * sn;
      s.cos1 += w * m * cs;
      s.cos2 += w * m * m * cs;
    }
    return s;
  };
  // C and its derivatives.
  auto C0 = [=](double t) { return Ct + lambda * std::cos(Omega * t); };
  auto C1 = [=](double t) { return -lambda * Omega * std::sin(Omega * t); };
  auto C2 = [=](double t) { return -lambda * Omega * Omega * std::cos(Omega * t); };
  auto C3 = [=](double t) { return lambda * Omega * Omega * Omega * std::sin(Omega * t); };
  // g = 1/C and derivatives.
  auto g0 = [=](double t) { return 1 / C0(t); };
  auto g1 = [=](double t) { return -C1(t) / (C0(t) * C0(t)); };
  auto g2 = [=](double t) {
    const double c = C0(t);
    return -C2(t) / (c * c) + 2 * C1(t) * C1(t) / (c * c * c);
  };

  ModelDescriptor m;
  m.name = "spin_orbit";
  m.dim = 1;
  m.parameters = {{"Ctilde", Ct},       {"lambda", lambda},       {"Omega", Omega},
                  {"nu", params.nu},    {"BmA", params.BmA},      {"e", params.eccentricity},
                  {"a", a},             {"mu", mu},               {"m_min", params.m_min},
                  {"m_max", params.m_max}, {"quad_points", params.quad_points},
                  {"truncation_tolerance", params.truncation_tolerance},
                  {"theta0", params.theta0}, {"theta_dot0", params.theta_dot0}};
  System& sys = m.system;
  sys.dim = 1;
  sys.potential = [=](const Vec& q, double t) { return -mu * q(0) - K / 2 * g0(t) * series(q(0), t).cos0; };
  sys.gradient = [=](const Vec& q, double t) -> Vec {
    return Vec::Constant(1, -mu + K * g0(t) * series(q(0), t).sin0);
  };
  sys.damping = [=](double t) { return -a + C1(t) / C0(t); };

  System::SecondDerivatives d2;
  d2.dV_dt = [=](const Vec& q, double t) {
    const auto s = series(q(0), t);
    return -K / 2 * (g1(t) * s.cos0 + g0(t) * s.sin1);
  };
  d2.hessian = [=](const Vec& q, double t) -> Matrix<double> {
    return Matrix<double>::Constant(1, 1, 2 * K * g0(t) * series(q(0), t).cos0);
  };
  d2.dgrad_dt = [=](const Vec& q, double t) -> Vec {
    const auto s = series(q(0), t);
    return Vec::Constant(1, K * (g1(t) * s.sin0 - g0(t) * s.cos1));
  };
  d2.d2V_dt2 = [=](const Vec& q, double t) {
    const auto s = series(q(0), t);
    return -K / 2 * (g2(t) * s.cos0 + 2 * g1(t) * s.sin1 - g0(t) * s.cos2);
  };
  d2.df_dt = [=](double t) {
    const double c = C0(t);
    return C2(t) / c - C1(t) * C1(t) / (c * c);
  };
  d2.d2f_dt2 = [=](double t) {
    const double c = C0(t), c1 = C1(t);
    return C3(t) / c - 3 * c1 * C2(t) / (c * c) + 2 * c1 * c1 * c1 / (c * c * c);
  };
  sys.second = d2;
  m.initial = make_state<double>(Vec::Constant(1, params.theta0), Vec::Constant(1, params.theta_dot0));
  m.angular = {true};
  return m;
}

}  // namespace contact::systems
