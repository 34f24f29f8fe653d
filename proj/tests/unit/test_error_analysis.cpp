#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace contact;
using namespace testing;
using Evaluator = ModifiedHamiltonianEvaluator<double>;

namespace {

// Lane-Emden H = p^2/2 + y^(n+1)/(n+1) + (2/x) s, written out here.
System lane_emden(double n) {
  System sys;
  sys.dim = 1;
  sys.potential = [n](const Vec& y, double) { return std::pow(y(0), n + 1) / (n + 1); };
  sys.gradient = [n](const Vec& y, double) -> Vec { return vec({std::pow(y(0), n)}); };
  sys.damping = [](double x) { return 2 / x; };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double) { return 0.0; };
  d2.hessian = [n](const Vec& y, double) -> Mat { return Mat::Constant(1, 1, n * std::pow(y(0), n - 1)); };
  d2.dgrad_dt = [](const Vec&, double) -> Vec { return Vec::Zero(1); };
  d2.d2V_dt2 = [](const Vec&, double) { return 0.0; };
  d2.df_dt = [](double x) { return -2 / (x * x); };
  d2.d2f_dt2 = [](double x) { return 4 / (x * x * x); };
  sys.second = d2;
  return sys;
}

// Printed Kepler correction with gamma = 1; `squared` reads |.| as the squared norm.
double kepler_correction(const ContactStated& x, double alpha, double w, bool squared) {
  const double q1 = x.q(0), q2 = x.q(1), p1 = x.p(0), p2 = x.p(1);
  const double Q = squared ? x.q.squaredNorm() : x.q.norm();
  const double P = squared ? x.p.squaredNorm() : x.p.norm();
  const double pq = x.p.dot(x.q), t = x.t, s = x.s;
  const double sn = std::sin(t * w), cs = std::cos(t * w);
  const double body = alpha * P * P * std::pow(Q, 5) * (alpha * sn * sn - w * cs) + 2 * alpha * Q * Q * pq * sn +
                      alpha * s * w * w * std::pow(Q, 5) * sn - 2 * alpha * std::pow(Q, 4) * (alpha * sn * sn + w * cs) +
                      2 * Q + 2 * pq * pq - p1 * p1 * q2 * q2 - p2 * p2 * q1 * q1 + 2 * p1 * p2 * q1 * q2;
  return body / (24 * std::pow(Q, 5));
}

ContactStated away_from_origin(std::mt19937_64& rng) {
  auto x = random_state(rng, 2, 0.5);
  x.q += vec({1.0, 0.3});
  x.t = std::abs(x.t) * 3;
  return x;
}

}  // namespace

TEST_CASE("modified Hamiltonian of the damped oscillator") {
  CHECK(modified_hamiltonian(oscillator(0.0), state({1}, {0})) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  std::mt19937_64 rng(1);
  for (double alpha : {0.0, 0.125, 0.7}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_state(rng, 1);
      const double q = x.q(0), p = x.p(0);
      const double closed = (2 * alpha * p * q + p * p * (alpha * alpha - 1) + q * q * (alpha * alpha + 2)) / 24;
      CHECK(modified_hamiltonian(oscillator(alpha), x) == doctest::Approx(closed).epsilon(1e-13));
    }
  }
}

TEST_CASE("Kepler correction takes |q| and |p| as Euclidean norms") {
  const double alpha = -0.01, Omega = 2 * M_PI;
  const Evaluator dh(kepler(alpha, Omega));
  std::mt19937_64 rng(44);
  double worst_norm = 0, best_squared = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = away_from_origin(rng);
    const double generic = dh(x);
    worst_norm = std::max(worst_norm, std::abs(generic - kepler_correction(x, alpha, Omega, false)));
    best_squared = std::min(best_squared, std::abs(generic - kepler_correction(x, alpha, Omega, true)));
  }
  CHECK(worst_norm < 1e-10);
  CHECK(best_squared > 1e-3);
}

TEST_CASE("modified flow matches one second-order step to fifth order") {
  const System sys = oscillator(0.125);
  const Evaluator dh(sys);
  const auto x = state({0.8}, {-0.3}, 0.2);
  std::vector<double> taus = {0.2, 0.1, 0.05}, defects;
  for (double tau : taus) {
    auto field = [&](double t, const Vec& z) {
      const auto y = ContactStated::from_phase(z, t);
      return Vec(canonical_field(sys)(t, z) + tau * tau * dh.vector_field(y).flat());
    };
    const Vec modified = rk4_flow(field, x.phase(), x.t, tau, 400);
    defects.push_back((step_s2(sys, x, tau).phase() - modified).norm());
  }
  CHECK(loglog_slope(taus, defects) >= 3.8);
}

TEST_CASE("one-step defect is tau^3 times the modified vector field") {
  const System sys = kepler(-0.07, M_PI);
  const Evaluator dh(sys);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    auto x = away_from_origin(rng);
    x.p += vec({0, 0.8});
    const double tau = 0.025;
    const Vec exact = rk4_flow(canonical_field(sys), x.phase(), x.t, tau, 200);
    const Vec defect = step_s2(sys, x, tau).phase() - exact;
    const Vec predicted = tau * tau * tau * dh.vector_field(x).flat();
    CHECK(defect.dot(predicted) / predicted.squaredNorm() == doctest::Approx(1.0).epsilon(0.1));
    CHECK((defect - predicted).norm() / predicted.norm() < 0.1);
  }
}

TEST_CASE("local error estimates") {
  const double alpha = 0.125, tau = 0.1;
  const Evaluator dh(oscillator(alpha));
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_state(rng, 1);
    const auto e = local_error_estimate(dh, x, tau);
    const double q = x.q(0), p = x.p(0);
    CHECK(e.dq(0) == doctest::Approx(tau * tau * tau / 12 * std::abs(alpha * q + p * (alpha * alpha - 1))).epsilon(1e-7));
    CHECK(e.dq(0) >= 0);
    CHECK(e.dp(0) >= 0);
    CHECK(e.ds >= 0);
    CHECK(e.time == x.t);
  }

  // Delta H' = -1/12 everywhere when V = t^2 and f = 0.
  System flat;
  flat.dim = 2;
  flat.potential = [](const Vec&, double t) { return t * t; };
  flat.gradient = [](const Vec&, double) -> Vec { return Vec::Zero(2); };
  flat.damping = [](double) { return 0.0; };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double t) { return 2 * t; };
  d2.hessian = [](const Vec&, double) -> Mat { return Mat::Zero(2, 2); };
  d2.dgrad_dt = [](const Vec&, double) -> Vec { return Vec::Zero(2); };
  d2.d2V_dt2 = [](const Vec&, double) { return 2.0; };
  d2.df_dt = [](double) { return 0.0; };
  d2.d2f_dt2 = [](double) { return 0.0; };
  flat.second = d2;
  const auto e = local_error_estimate(flat, state({0.3, 1}, {2, -1}, 4, 0.5), 0.2);
  CHECK(e.dq.norm() < 1e-15);
  CHECK(e.dp.norm() < 1e-15);
  CHECK(e.ds == doctest::Approx(0.008 / 12).epsilon(1e-12));
}

TEST_CASE("first Lane-Emden step from the generic correction") {
  const double tau = 0.2;
  for (double n : {0.0, 1.0, 5.0}) {
    CAPTURE(n);
    const auto e = local_error_estimate(lane_emden(n), state({1}, {0}, 0, tau), tau);
    // Substituting f = 2/x, V = y^(n+1)/(n+1) at y = 1, p = s = 0.
    CHECK(e.dq(0) == doctest::Approx(tau * tau / 6).epsilon(1e-8));
    CHECK(e.dp(0) == doctest::Approx(tau / 6 + n * tau * tau * tau / 6).epsilon(1e-8));
    CHECK(e.ds == doctest::Approx(tau / (6 * (n + 1)) + tau * tau * tau / 12).epsilon(1e-8));
  }
}

TEST_CASE("error analysis refuses systems without second derivatives") {
  System bare = oscillator(0.1);
  bare.second.reset();
  CHECK_THROWS_AS(Evaluator{bare}, MissingDerivative);
  CHECK_THROWS_AS(modified_hamiltonian(bare, state({1}, {0})), MissingDerivative);
  CHECK_THROWS_AS(local_error_estimate(bare, state({1}, {0}), 0.1), MissingDerivative);
}

TEST_CASE("cumulative bound") {
  const System sys = oscillator(0.125);
  const Evaluator dh(sys);
  CHECK(accumulate_error_bound(TrajectoryRecord<double>{}, dh, 0.1).empty());

  const double tau = 0.05;
  const auto tr = integrate(sys, state({1}, {0}), tau, 40, base_scheme<double>());
  const auto bound = accumulate_error_bound(tr, dh, tau);
  REQUIRE(bound.size() == tr.points.size());
  CHECK(bound[0] == 0);
  double running = 0;
  for (std::size_t j = 1; j < bound.size(); ++j) {
    const auto e = local_error_estimate(dh, tr.points[j - 1].state, tau);
    running += std::sqrt(e.dq.squaredNorm() + e.dp.squaredNorm() + e.ds * e.ds);
    CHECK(bound[j] == doctest::Approx(running).epsilon(1e-14));
    CHECK(bound[j] >= bound[j - 1]);
  }

  IntegrateOptions<double> sparse;
  sparse.stride = 2;
  const auto strided = integrate(sys, state({1}, {0}), tau, 40, base_scheme<double>(), sparse);
  CHECK_THROWS_AS(accumulate_error_bound(strided, dh, tau), InvalidArgument);

  // Singular start: the first step is accounted at the floor time.
  const Evaluator le(lane_emden(1));
  TrajectoryRecord<double> start;
  start.points = {{0, state({1}, {0}, 0, 0)}, {1, state({0.99}, {-0.06}, 0, 0.2)}};
  ErrorBoundOptions<double> floor;
  floor.min_time = 0.2;
  const auto b = accumulate_error_bound(start, le, 0.2, floor);
  CHECK(b[1] == doctest::Approx(local_error_estimate(le, state({1}, {0}, 0, 0.2), 0.2).norm()));
}

TEST_CASE("cumulative bound dominates the error at small steps") {
  const double alpha = 0.125, tau = 0.001;
  const System sys = oscillator(alpha);
  const Evaluator dh(sys);
  const OscillatorSolution exact{alpha, 1.0, 0.0};
  const auto tr = integrate(sys, state({1}, {0}), tau, 2000, base_scheme<double>());
  const auto bound = accumulate_error_bound(tr, dh, tau);
  double envelope = 0;
  for (std::size_t j = 1; j < tr.points.size(); ++j) {
    const auto& x = tr.points[j].state;
    envelope = std::max(envelope, std::hypot(x.q(0) - exact.q(x.t), x.p(0) - exact.p(x.t)));
    CHECK(bound[j] >= envelope);
  }
}

TEST_CASE("RK4 baseline") {
  // Rotation q' = p, p' = -q.
  const System rot = oscillator(0.0);
  const double tau = 0.1;
  const auto x = rk4_step(rot, state({1}, {0}), tau);
  CHECK(std::abs(x.q(0) - std::cos(tau)) < std::pow(tau, 5));
  CHECK(std::abs(x.p(0) + std::sin(tau)) < std::pow(tau, 5));

  const OscillatorSolution exact{0.125, 1.0, 0.0};
  std::vector<double> taus = {0.2, 0.1, 0.05, 0.025}, errs;
  for (double h : taus) {
    const auto tr = rk4_reference(oscillator(0.125), state({1}, {0}), h, std::lround(10 / h));
    errs.push_back(std::hypot(tr.final_state().q(0) - exact.q(10), tr.final_state().p(0) - exact.p(10)));
  }
  CHECK(loglog_slope(taus, errs) == doctest::Approx(4.0).epsilon(0.05));

  // Self-convergence of the fine reference.
  const auto a = rk4_reference(oscillator(0.125), state({1}, {0}, 0.3), 0.001, 1000);
  const auto b = rk4_reference(oscillator(0.125), state({1}, {0}, 0.3), 0.0005, 2000);
  CHECK((a.final_state().phase() - b.final_state().phase()).norm() < 1e-9);

  // Divergence is reported, not thrown.
  System blowup = oscillator(0.0);
  blowup.gradient = [](const Vec& q, double) -> Vec { return -q * q.squaredNorm() * 1e6; };
  const auto bad = rk4_reference(blowup, state({10}, {0}), 0.5, 100);
  CHECK_FALSE(bad.ok());
  CHECK(bad.failure_step > 0);
}
