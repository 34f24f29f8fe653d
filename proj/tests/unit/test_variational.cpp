#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "support.hpp"

using namespace contact;
using namespace testing;
using Ld = DiscreteLagrangian<double>;

namespace {

System free_particle() {
  System sys;
  sys.dim = 1;
  sys.potential = [](const Vec&, double) { return 0.0; };
  sys.gradient = [](const Vec&, double) -> Vec { return Vec::Zero(1); };
  sys.damping = [](double) { return 0.0; };
  return sys;
}

// V = q^2/2 + q^4/4, no damping.
System anharmonic() {
  System sys;
  sys.dim = 1;
  sys.potential = [](const Vec& q, double) { return q(0) * q(0) / 2 + std::pow(q(0), 4) / 4; };
  sys.gradient = [](const Vec& q, double) -> Vec { return vec({q(0) + std::pow(q(0), 3)}); };
  sys.damping = [](double) { return 0.0; };
  return sys;
}

std::map<std::string, Ld> discretisations(const System& sys) {
  const auto L = lagrangian_of(sys);
  return {{"midpoint", midpoint_discrete_lagrangian(L)},
          {"trapezoid", trapezoid_discrete_lagrangian(L)},
          {"galerkin", galerkin4_discrete_lagrangian(L)}};
}

double qp_error_at(const Ld& d, double tau, double T) {
  const OscillatorSolution exact{0.125, 1.0, 0.0};
  HerglotzIntegrator<double> step(d, tau);
  const auto tr = integrate(state({1}, {0}), tau, std::lround(T / tau), step);
  const auto& x = tr.final_state();
  return std::hypot(x.q(0) - exact.q(T), x.p(0) - exact.p(T));
}

}  // namespace

TEST_CASE("Legendre dual of the canonical class") {
  const System kep = kepler(-0.07, M_PI);
  const auto L = lagrangian_of(kep);
  const Vec q = vec({0.8, 0.4}), v = vec({0.1, -1.2});
  const double t = 0.3, s = 0.45;
  CHECK(L.value(t, q, v, s) == doctest::Approx(v.squaredNorm() / 2 + 1 / q.norm() - kep.damping(t) * s));
  const Vec gq = central_gradient<double>([&](const Vec& z) { return L.value(t, z, v, s); }, q);
  const Vec gv = central_gradient<double>([&](const Vec& z) { return L.value(t, q, z, s); }, v);
  CHECK((gq - L.dL_dq(t, q, v, s)).norm() < 1e-8);
  CHECK((gv - L.dL_dv(t, q, v, s)).norm() < 1e-8);
  CHECK(L.dL_ds(t, q, v, s) == doctest::Approx(central_derivative<double>([&](double z) { return L.value(t, q, v, z); }, s)));
}

TEST_CASE("free particle discrete Lagrangians") {
  for (const auto& [name, d] : discretisations(free_particle())) {
    CAPTURE(name);
    const double tau = 0.1, q0 = 0.3, q1 = 0.55;
    const auto value = d.evaluate(0.0, vec({q0}), vec({q1}), 0.2, tau);
    CHECK(value.value == doctest::Approx((q1 - q0) * (q1 - q0) / (2 * tau * tau)).epsilon(1e-12));

    const auto out = herglotz_step(d, state({0}, {1}, 0), tau, SolverSettings{});
    CHECK(out.state.q(0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(out.state.p(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.state.s == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(out.state.t == doctest::Approx(0.1));
  }
  // The interior control point of the quadratic curve sits at the midpoint.
  const auto L = lagrangian_of(free_particle());
  const auto tab = ButcherTableau<double>::classical_rk4();
  const auto action = galerkin_action<double>(L, tab, 0.0, {vec({0.3}), vec({0.425}), vec({0.55})}, 0.2, 0.1);
  CHECK(std::abs(action.d_q[1](0)) < 1e-12);
}

TEST_CASE("discrete Lagrangians tend to L at zero velocity") {
  const System kep = kepler(-0.07, M_PI);
  const auto L = lagrangian_of(kep);
  const Vec q = vec({0.9, -0.3});
  for (const auto& [name, d] : discretisations(kep)) {
    CAPTURE(name);
    const auto v = d.evaluate(0.4, q, q, 0.2, 1e-6);
    CHECK(v.value == doctest::Approx(L.value(0.4, q, Vec::Zero(2), 0.2)).epsilon(1e-5));
  }
}

TEST_CASE("discrete Lagrangian partials match finite differences") {
  const System kep = kepler(-0.07, M_PI);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (const auto& [name, d] : discretisations(kep)) {
    CAPTURE(name);
    for (int trial = 0; trial < 5; ++trial) {
      const double tau = 0.1, t = 1 + u(rng), s0 = u(rng);
      const Vec q0 = vec({1 + u(rng), 0.5 + u(rng)});
      const Vec q1 = q0 + vec({u(rng), 0.1 + u(rng)});
      const auto v = d.evaluate(t, q0, q1, s0, tau);
      const Vec g0 = central_gradient<double>([&](const Vec& z) { return d.evaluate(t, z, q1, s0, tau).value; }, q0);
      const Vec g1 = central_gradient<double>([&](const Vec& z) { return d.evaluate(t, q0, z, s0, tau).value; }, q1);
      const double gs = central_derivative<double>([&](double z) { return d.evaluate(t, q0, q1, z, tau).value; }, s0);
      for (Eigen::Index i = 0; i < 2; ++i) {
        CHECK(relative_mismatch(g0(i), v.d_q0(i)) < 1e-5);
        CHECK(relative_mismatch(g1(i), v.d_q1(i)) < 1e-5);
      }
      CHECK(relative_mismatch(gs, v.d_s0) < 1e-5);
    }
  }
}

TEST_CASE("midpoint rule reduces to the classical midpoint integrator without damping") {
  const System sys = anharmonic();
  const Ld d = midpoint_discrete_lagrangian(lagrangian_of(sys));
  const double tau = 0.2;
  SolverSettings tight;
  tight.tolerance = 1e-15;
  auto x = state({0.7}, {-0.4});
  double q = 0.7, p = -0.4;
  for (int k = 0; k < 50; ++k) {
    // p0 = (q1 - q0)/tau + tau/2 V'(qm), p1 = (q1 - q0)/tau - tau/2 V'(qm).
    auto dV = [](double z) { return z + z * z * z; };
    auto d2V = [](double z) { return 1 + 3 * z * z; };
    double q1 = q + tau * p;
    for (int it = 0; it < 60; ++it) {
      const double qm = (q + q1) / 2;
      const double r = (q1 - q) / tau + tau / 2 * dV(qm) - p;
      const double dr = 1 / tau + tau / 4 * d2V(qm);
      q1 -= r / dr;
    }
    const double p1 = (q1 - q) / tau - tau / 2 * dV((q + q1) / 2);
    q = q1;
    p = p1;
    x = herglotz_step(d, x, tau, tight).state;
    CHECK(std::abs(x.q(0) - q) < 1e-12);
    CHECK(std::abs(x.p(0) - p) < 1e-12);
    q = x.q(0);
    p = x.p(0);
  }
}

TEST_CASE("trapezoid rule reduces to Stormer-Verlet without damping") {
  const System sys = anharmonic();
  const Ld d = trapezoid_discrete_lagrangian(lagrangian_of(sys));
  const double tau = 0.2;
  SolverSettings tight;
  tight.tolerance = 1e-15;
  auto x = state({0.7}, {-0.4});
  double q = 0.7, p = -0.4;
  auto dV = [](double z) { return z + z * z * z; };
  for (int k = 0; k < 50; ++k) {
    const double ph = p - tau / 2 * dV(q);
    q += tau * ph;
    p = ph - tau / 2 * dV(q);
    x = herglotz_step(d, x, tau, tight).state;
    CHECK(std::abs(x.q(0) - q) < 1e-12);
    CHECK(std::abs(x.p(0) - p) < 1e-12);
    q = x.q(0);
    p = x.p(0);
  }
}

TEST_CASE("Galerkin stages are classical RK4 along the quadratic curve") {
  const System kep = kepler(-0.07, M_PI);
  const auto L = lagrangian_of(kep);
  const auto tab = ButcherTableau<double>::classical_rk4();
  const double t0 = 0.7, tau = 0.15, s0 = 0.33;
  const Vec q0 = vec({1.0, 0.2}), q1 = vec({1.05, 0.35}), q2 = vec({1.08, 0.52});
  auto Q = [&](double c) { return Vec(2 * (c - 0.5) * (c - 1) * q0 - 4 * c * (c - 1) * q1 + 2 * c * (c - 0.5) * q2); };
  auto V = [&](double c) { return Vec(((4 * c - 3) * q0 + (4 - 8 * c) * q1 + (4 * c - 1) * q2) / tau); };
  CHECK((V(0) - (-3 * q0 + 4 * q1 - q2) / tau).norm() < 1e-12);
  CHECK((V(0.5) - (q2 - q0) / tau).norm() < 1e-12);
  CHECK((V(1) - (q0 - 4 * q1 + 3 * q2) / tau).norm() < 1e-12);

  auto rate = [&](double c, double s) { return L.value(t0 + c * tau, Q(c), V(c), s); };
  const double k1 = tau * rate(0, s0);
  const double k2 = tau * rate(0.5, s0 + k1 / 2);
  const double k3 = tau * rate(0.5, s0 + k2 / 2);
  const double k4 = tau * rate(1, s0 + k3);
  const auto action = galerkin_action<double>(L, tab, t0, {q0, q1, q2}, s0, tau);
  REQUIRE(action.stages.size() == 4);
  CHECK(std::abs(action.stages[0] - k1) < 1e-12);
  CHECK(std::abs(action.stages[1] - k2) < 1e-12);
  CHECK(std::abs(action.stages[2] - k3) < 1e-12);
  CHECK(std::abs(action.stages[3] - k4) < 1e-12);
  CHECK(std::abs(action.s1 - (s0 + (k1 + 2 * k2 + 2 * k3 + k4) / 6)) < 1e-12);
}

TEST_CASE("second-order variational integrators converge at order 2") {
  const auto ds = discretisations(oscillator(0.125));
  for (const char* name : {"midpoint", "trapezoid"}) {
    CAPTURE(name);
    std::vector<double> taus = {0.2, 0.1, 0.05, 0.025}, errs;
    for (double tau : taus) errs.push_back(qp_error_at(ds.at(name), tau, 10.0));
    CHECK(loglog_slope(taus, errs) == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("midpoint action update is second order") {
  const System sys = oscillator(0.125);
  const Ld d = midpoint_discrete_lagrangian(lagrangian_of(sys));
  const double T = 2.0;
  const Vec reference = rk4_flow(canonical_field(sys), state({1}, {0}, 0.5).phase(), 0.0, T, 20000);
  std::vector<double> taus = {0.1, 0.05, 0.025}, errs;
  for (double tau : taus) {
    HerglotzIntegrator<double> step(d, tau);
    const auto tr = integrate(state({1}, {0}, 0.5), tau, std::lround(T / tau), step);
    errs.push_back(std::abs(tr.final_state().s - reference(2)));
  }
  CHECK(loglog_slope(taus, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("Galerkin integrator is fourth order without damping") {
  const System sys = oscillator(0.0);
  const Ld d = galerkin4_discrete_lagrangian(lagrangian_of(sys));
  std::vector<double> taus = {0.2, 0.1, 0.05, 0.025}, errs;
  for (double tau : taus) {
    HerglotzIntegrator<double> step(d, tau);
    const double T = 10.0;
    const auto tr = integrate(state({1}, {0}), tau, std::lround(T / tau), step);
    const auto& x = tr.final_state();
    errs.push_back(std::hypot(x.q(0) - std::cos(T), x.p(0) + std::sin(T)));
  }
  CHECK(loglog_slope(taus, errs) >= 3.8);
}

TEST_CASE("momenta match and the action is the sum of discrete Lagrangians") {
  const System kep = kepler(-0.07, M_PI);
  for (const auto& [name, d] : discretisations(kep)) {
    CAPTURE(name);
    const double tau = 0.05;
    auto x = state({0.6, 0}, {0, 1.5275}, 0.1);
    const double s0 = x.s;
    double action = 0;
    double worst = 0;
    HerglotzIntegrator<double> step(d, tau);
    for (int k = 0; k < 40; ++k) {
      const auto next = step(x);
      action += tau * d.evaluate(x.t, x.q, next.q, x.s, tau).value;
      // p_k^- (carried in the state) against p_k^+ implied by the step.
      worst = std::max(worst, (forward_momentum(d, x, next.q, tau) - x.p).norm());
      x = next;
    }
    CHECK(worst < 1e-10);
    CHECK(x.s - s0 == doctest::Approx(action).epsilon(1e-13));
  }
}

TEST_CASE("Herglotz step maps preserve the contact structure") {
  std::mt19937_64 rng(99);
  const System kep = kepler(-0.07, M_PI);
  const System osc = oscillator(0.125);
  for (const auto& [name, d] : discretisations(kep)) {
    CAPTURE(name);
    for (int trial = 0; trial < 3; ++trial) {
      auto x = random_state(rng, 2, 0.3);
      x.q += vec({1.0, 0.2});
      x.p += vec({0.0, 1.0});
      auto step = [&](const ContactStated& z) { return herglotz_step(d, z, 0.1, SolverSettings{}).state; };
      CHECK(contact_pullback_residual<double>(step, x).residual < 1e-6);
    }
  }
  for (const auto& [name, d] : discretisations(osc)) {
    CAPTURE(name);
    const auto x = random_state(rng, 1);
    auto step = [&](const ContactStated& z) { return herglotz_step(d, z, 0.1, SolverSettings{}).state; };
    CHECK(contact_pullback_residual<double>(step, x).residual < 1e-6);
  }
}

TEST_CASE("solver failures are reported") {
  SolverSettings bad;
  bad.tolerance = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.tolerance = 1e-12;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(HerglotzIntegrator<double>(trapezoid_discrete_lagrangian(lagrangian_of(free_particle())), 0.1, bad),
                  InvalidArgument);

  const System kep = kepler(-0.07, M_PI);
  SolverSettings once;
  once.max_iterations = 1;
  const Ld d = trapezoid_discrete_lagrangian(lagrangian_of(kep));
  try {
    herglotz_step(d, state({0.6, 0}, {0, 1.5}), 0.5, once, std::optional<Vec>(vec({3.0, 3.0})));
    FAIL("expected non-convergence");
  } catch (const NonConvergence& e) {
    CHECK(e.residual() > 1e-12);
  }

  // 1 + tau dLd/ds vanishes identically.
  Ld degenerate;
  degenerate.dim = 1;
  degenerate.evaluate = [](double, const Vec& q0, const Vec& q1, double, double tau) {
    DiscreteLagrangianValue<double> out;
    out.value = 0;
    out.d_q0 = -(q1 - q0) / (tau * tau);
    out.d_q1 = (q1 - q0) / (tau * tau);
    out.d_s0 = -1 / tau;
    return out;
  };
  CHECK_THROWS_AS(herglotz_step(degenerate, state({0}, {1}), 0.1, SolverSettings{}), DenominatorNearZero);
  CHECK_THROWS_AS(herglotz_step(d, state({0}, {1}), 0.1, SolverSettings{}), InvalidArgument);
}

TEST_CASE("initial guess strategies agree") {
  const System kep = kepler(-0.07, M_PI);
  const Ld d = trapezoid_discrete_lagrangian(lagrangian_of(kep));
  SolverSettings drift;
  drift.initial_guess = SolverSettings::InitialGuess::Drift;
  HerglotzIntegrator<double> a(d, 0.05), b(d, 0.05, drift);
  auto x = state({0.6, 0}, {0, 1.5275}), y = x;
  int iterations = 0;
  for (int k = 0; k < 100; ++k) {
    x = a(x);
    y = b(y);
    iterations = std::max(iterations, a.last_iterations());
  }
  CHECK((x.phase() - y.phase()).norm() < 1e-9);
  CHECK(iterations <= 3);
}
