#include <cmath>

#include "contact/systems/models.hpp"

namespace contact::systems {

namespace {

// q(t), q'(t) for q'' + alpha q' + q = 0, elapsed time u from (q0, p0).
std::pair<double, double> oscillator_qp(double alpha, double q0, double p0, double u) {
  const double half = alpha / 2;
  const double disc = half * half - 1;
  if (disc < 0) {
    const double w = std::sqrt(-disc);
    const double B = (p0 + half * q0) / w;
    const double decay = std::exp(-half * u);
    const double c = std::cos(w * u), s = std::sin(w * u);
    const double q = decay * (q0 * c + B * s);
    const double p = decay * (-half * (q0 * c + B * s) + w * (-q0 * s + B * c));
    return {q, p};
  }
  if (disc == 0) {
    const double B = p0 + half * q0;
    const double decay = std::exp(-half * u);
    return {decay * (q0 + B * u), decay * (B - half * (q0 + B * u))};
  }
  const double root = std::sqrt(disc);
  const double rp = -half + root, rm = -half - root;
  const double A = (p0 - rm * q0) / (rp - rm);
  const double B = q0 - A;
  return {A * std::exp(rp * u) + B * std::exp(rm * u), A * rp * std::exp(rp * u) + B * rm * std::exp(rm * u)};
}

}  // namespace

State damped_oscillator_solution(double alpha, const State& initial, double t) {
  const double q0 = initial.q(0), p0 = initial.p(0);
  const double u = t - initial.t;
  const auto [q, p] = oscillator_qp(alpha, q0, p0, u);
  // (e^{alpha u} s)' = e^{alpha u} (p^2/2 - q^2/2)
  const double integral = gauss_legendre(
      [&](double v) {
        const auto [qv, pv] = oscillator_qp(alpha, q0, p0, v);
        return std::exp(alpha * v) * (pv * pv - qv * qv) / 2;
      },
      0.0, u);
  State out;
  out.q = Vec::Constant(1, q);
  out.p = Vec::Constant(1, p);
  out.s = std::exp(-alpha * u) * (initial.s + integral);
  out.t = t;
  return out;
}

ModelDescriptor make_damped_oscillator(double alpha) {
  return make_damped_oscillator(alpha, make_state<double>(Vec::Constant(1, 1.0), Vec::Constant(1, 0.0)));
}

ModelDescriptor make_damped_oscillator(double alpha, const State& initial) {
  if (!std::isfinite(alpha)) throw InvalidArgument("damped oscillator: alpha must be finite");
  if (initial.dim() != 1) throw InvalidArgument("damped oscillator has one degree of freedom");
  ModelDescriptor m;
  m.name = "damped_oscillator";
  m.dim = 1;
  m.parameters = {{"alpha", alpha}};
  System& sys = m.system;
  sys.dim = 1;
  sys.potential = [](const Vec& q, double) { return q.squaredNorm() / 2; };
  sys.gradient = [](const Vec& q, double) -> Vec { return q; };
  sys.damping = [alpha](double) { return alpha; };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double) { return 0.0; };
  d2.hessian = [](const Vec& q, double) -> Matrix<double> { return Matrix<double>::Identity(q.size(), q.size()); };
  d2.dgrad_dt = [](const Vec& q, double) -> Vec { return Vec::Zero(q.size()); };
  d2.d2V_dt2 = [](const Vec&, double) { return 0.0; };
  d2.df_dt = [](double) { return 0.0; };
  d2.d2f_dt2 = [](double) { return 0.0; };
  sys.second = d2;
  m.initial = initial;
  m.exact = [alpha, initial](double t) { return damped_oscillator_solution(alpha, initial, t); };
  m.angular = {false};
  return m;
}

}  // namespace contact::systems
