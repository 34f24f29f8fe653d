#pragma once

#include <functional>
#include <optional>

#include "contact/hamiltonian.hpp"
#include "contact/newton.hpp"

namespace contact {

/// Contact Lagrangian L(t, q, qdot, s) with first partials.
template <typename Scalar>
struct ContactLagrangian {
  using Vec = Vector<Scalar>;
  using ScalarFn = std::function<Scalar(Scalar, const Vec&, const Vec&, Scalar)>;
  using VectorFn = std::function<Vec(Scalar, const Vec&, const Vec&, Scalar)>;

  Eigen::Index dim = 0;
  ScalarFn value;
  VectorFn dL_dq;
  VectorFn dL_dv;
  ScalarFn dL_ds;
};

/// Legendre dual of the canonical Hamiltonian: L = |v|^2/2 - V(q, t) - f(t) s.
template <typename Scalar>
ContactLagrangian<Scalar> lagrangian_of(const SeparableContactSystem<Scalar>& sys) {
  using Vec = Vector<Scalar>;
  ContactLagrangian<Scalar> L;
  L.dim = sys.dim;
  L.value = [sys](Scalar t, const Vec& q, const Vec& v, Scalar s) {
    return v.squaredNorm() / 2 - sys.potential(q, t) - sys.damping(t) * s;
  };
  L.dL_dq = [sys](Scalar t, const Vec& q, const Vec&, Scalar) -> Vec { return -sys.gradient(q, t); };
  L.dL_dv = [](Scalar, const Vec&, const Vec& v, Scalar) -> Vec { return v; };
  L.dL_ds = [sys](Scalar t, const Vec&, const Vec&, Scalar) { return -sys.damping(t); };
  return L;
}

/// Value and partials of a one-s discrete Lagrangian Ld(t, q0, q1, s0, tau).
template <typename Scalar>
struct DiscreteLagrangianValue {
  Scalar value = 0;
  Vector<Scalar> d_q0;
  Vector<Scalar> d_q1;
  Scalar d_s0 = 0;
};

template <typename Scalar>
struct DiscreteLagrangian {
  using Vec = Vector<Scalar>;
  Eigen::Index dim = 0;
  std::function<DiscreteLagrangianValue<Scalar>(Scalar, const Vec&, const Vec&, Scalar, Scalar)> evaluate;
};

/// Midpoint rule in q with a half-step predictor for s:
///   Ld = L(t + tau/2, qm, v, s0 + tau/2 L(t + tau/2, qm, v, s0)),
///   qm = (q0 + q1)/2, v = (q1 - q0)/tau.
/// Freezing s at s0 instead would make the s-update (and through the
/// momentum denominator, the whole map) only first order.
template <typename Scalar>
DiscreteLagrangian<Scalar> midpoint_discrete_lagrangian(const ContactLagrangian<Scalar>& cl) {
  using Vec = Vector<Scalar>;
  DiscreteLagrangian<Scalar> Ld;
  Ld.dim = cl.dim;
  Ld.evaluate = [cl](Scalar t, const Vec& q0, const Vec& q1, Scalar s0, Scalar tau) {
    const Scalar tm = t + tau / 2;
    const Vec qm = (q0 + q1) / 2;
    const Vec v = (q1 - q0) / tau;
    // Predictor stage at s0.
    const Scalar L0 = cl.value(tm, qm, v, s0);
    const Vec dL0_dq0 = cl.dL_dq(tm, qm, v, s0) / 2 - cl.dL_dv(tm, qm, v, s0) / tau;
    const Vec dL0_dq1 = cl.dL_dq(tm, qm, v, s0) / 2 + cl.dL_dv(tm, qm, v, s0) / tau;
    const Scalar dL0_ds = cl.dL_ds(tm, qm, v, s0);
    // Corrector at the predicted midpoint action.
    const Scalar sm = s0 + tau / 2 * L0;
    const Vec Lq = cl.dL_dq(tm, qm, v, sm);
    const Vec Lv = cl.dL_dv(tm, qm, v, sm);
    const Scalar Ls = cl.dL_ds(tm, qm, v, sm);
    DiscreteLagrangianValue<Scalar> out;
    out.value = cl.value(tm, qm, v, sm);
    out.d_q0 = Lq / 2 - Lv / tau + Ls * tau / 2 * dL0_dq0;
    out.d_q1 = Lq / 2 + Lv / tau + Ls * tau / 2 * dL0_dq1;
    out.d_s0 = Ls * (1 + tau / 2 * dL0_ds);
    return out;
  };
  return Ld;
}

/// Linear interpolation in q with Heun's method for s:
///   k0 = L(t, q0, v, s0),  k1 = L(t + tau, q1, v, s0 + tau k0),  Ld = (k0 + k1)/2.
/// Reduces to Stormer-Verlet when L does not depend on s. Unlike the midpoint
/// rule the force is never sampled between q0 and q1, so the step stays
/// solvable near a central singularity at large tau.
template <typename Scalar>
DiscreteLagrangian<Scalar> trapezoid_discrete_lagrangian(const ContactLagrangian<Scalar>& cl) {
  using Vec = Vector<Scalar>;
  DiscreteLagrangian<Scalar> Ld;
  Ld.dim = cl.dim;
  Ld.evaluate = [cl](Scalar t, const Vec& q0, const Vec& q1, Scalar s0, Scalar tau) {
    const Vec v = (q1 - q0) / tau;
    const Scalar k0 = cl.value(t, q0, v, s0);
    const Vec Lv0 = cl.dL_dv(t, q0, v, s0);
    const Vec dk0_dq0 = cl.dL_dq(t, q0, v, s0) - Lv0 / tau;
    const Vec dk0_dq1 = Lv0 / tau;
    const Scalar dk0_ds = cl.dL_ds(t, q0, v, s0);

    const Scalar s1 = s0 + tau * k0;
    const Scalar k1 = cl.value(t + tau, q1, v, s1);
    const Vec Lv1 = cl.dL_dv(t + tau, q1, v, s1);
    const Scalar Ls1 = cl.dL_ds(t + tau, q1, v, s1);
    const Vec dk1_dq0 = -Lv1 / tau + Ls1 * tau * dk0_dq0;
    const Vec dk1_dq1 = cl.dL_dq(t + tau, q1, v, s1) + Lv1 / tau + Ls1 * tau * dk0_dq1;

    DiscreteLagrangianValue<Scalar> out;
    out.value = (k0 + k1) / 2;
    out.d_q0 = (dk0_dq0 + dk1_dq0) / 2;
    out.d_q1 = (dk0_dq1 + dk1_dq1) / 2;
    out.d_s0 = (dk0_ds + Ls1 * (1 + tau * dk0_ds)) / 2;
    return out;
  };
  return Ld;
}

/// Explicit Runge-Kutta tableau.
template <typename Scalar>
struct ButcherTableau {
  Matrix<Scalar> a;
  Vector<Scalar> b;
  Vector<Scalar> c;

  static ButcherTableau classical_rk4() {
    ButcherTableau tab;
    tab.a = Matrix<Scalar>::Zero(4, 4);
    tab.a(1, 0) = Scalar(0.5);
    tab.a(2, 1) = Scalar(0.5);
    tab.a(3, 2) = Scalar(1);
    tab.b.resize(4);
    tab.b << Scalar(1) / 6, Scalar(1) / 3, Scalar(1) / 3, Scalar(1) / 6;
    tab.c.resize(4);
    tab.c << 0, Scalar(0.5), Scalar(0.5), 1;
    return tab;
  }
};

/// Quadratic interpolant through control points at relative times 0, 1/2, 1.
/// Returns basis values and derivatives (w.r.t. relative time) at c.
template <typename Scalar>
std::pair<std::array<Scalar, 3>, std::array<Scalar, 3>> quadratic_basis(Scalar c) {
  return {{2 * (c - Scalar(0.5)) * (c - 1), -4 * c * (c - 1), 2 * c * (c - Scalar(0.5))},
          {4 * c - 3, 4 - 8 * c, 4 * c - 1}};
}

/// s1 from one RK pass over sdot = L along the quadratic curve, with its
/// sensitivities to the three control points and to s0.
template <typename Scalar>
struct GalerkinAction {
  Scalar s1 = 0;
  std::array<Vector<Scalar>, 3> d_q;
  Scalar d_s0 = 0;
  std::vector<Scalar> stages;  // k_i
};

template <typename Scalar>
GalerkinAction<Scalar> galerkin_action(const ContactLagrangian<Scalar>& cl, const ButcherTableau<Scalar>& tab, Scalar t0,
                                       const std::array<Vector<Scalar>, 3>& control, Scalar s0, Scalar tau) {
  using Vec = Vector<Scalar>;
  const Eigen::Index n = control[0].size();
  const Eigen::Index stages = tab.b.size();
  std::vector<Scalar> k(stages);
  std::vector<std::array<Vec, 3>> dk_dq(stages);
  std::vector<Scalar> dk_ds(stages);

  GalerkinAction<Scalar> out;
  out.s1 = s0;
  out.d_s0 = 1;
  for (int j = 0; j < 3; ++j) out.d_q[j] = Vec::Zero(n);

  for (Eigen::Index i = 0; i < stages; ++i) {
    const auto [ell, dell] = quadratic_basis(tab.c(i));
    Vec Q = Vec::Zero(n), V = Vec::Zero(n);
    for (int j = 0; j < 3; ++j) {
      Q += ell[j] * control[j];
      V += dell[j] / tau * control[j];
    }
    Scalar S = s0;
    Scalar dS_ds = 1;
    std::array<Vec, 3> dS_dq{Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
    for (Eigen::Index l = 0; l < i; ++l) {
      const Scalar a = tab.a(i, l);
      if (a == 0) continue;
      S += a * k[l];
      dS_ds += a * dk_ds[l];
      for (int j = 0; j < 3; ++j) dS_dq[j] += a * dk_dq[l][j];
    }
    const Scalar t = t0 + tab.c(i) * tau;
    const Vec Lq = cl.dL_dq(t, Q, V, S);
    const Vec Lv = cl.dL_dv(t, Q, V, S);
    const Scalar Ls = cl.dL_ds(t, Q, V, S);
    k[i] = tau * cl.value(t, Q, V, S);
    dk_ds[i] = tau * Ls * dS_ds;
    for (int j = 0; j < 3; ++j) dk_dq[i][j] = tau * (ell[j] * Lq + dell[j] / tau * Lv + Ls * dS_dq[j]);

    out.s1 += tab.b(i) * k[i];
    out.d_s0 += tab.b(i) * dk_ds[i];
    for (int j = 0; j < 3; ++j) out.d_q[j] += tab.b(i) * dk_dq[i][j];
  }
  out.stages = std::move(k);
  return out;
}

/// Solver controls for the implicit variational steps.
struct SolverSettings {
  enum class InitialGuess { Extrapolate, Drift };

  int max_iterations = 50;
  double tolerance = 1e-12;  // absolute, on the momentum-matching residual
  InitialGuess initial_guess = InitialGuess::Extrapolate;

  void validate() const {
    if (!(tolerance > 0)) throw InvalidArgument("solver tolerance must be positive");
    if (max_iterations < 1) throw InvalidArgument("solver needs at least one iteration");
  }
};

/// Ld(q0, q2, s0, tau) = ext over the midpoint control value q1 of (s1 - s0)/tau,
/// where s1 comes from classical RK4 on sdot = L along the quadratic curve.
/// The interior extremum is found by Newton on ds1/dq1 = 0 with tolerance
/// 0.01 * settings.tolerance.
template <typename Scalar>
DiscreteLagrangian<Scalar> galerkin4_discrete_lagrangian(const ContactLagrangian<Scalar>& cl,
                                                         const SolverSettings& settings = {}) {
  using Vec = Vector<Scalar>;
  settings.validate();
  const auto tab = ButcherTableau<Scalar>::classical_rk4();
  DiscreteLagrangian<Scalar> Ld;
  Ld.dim = cl.dim;
  Ld.evaluate = [cl, tab, settings](Scalar t, const Vec& q0, const Vec& q2, Scalar s0, Scalar tau) {
    auto interior_gradient = [&](const Vec& q1) {
      return galerkin_action<Scalar>(cl, tab, t, {q0, q1, q2}, s0, tau).d_q[1];
    };
    const Vec guess = (q0 + q2) / 2;
    const auto inner = newton_solve<Scalar>(interior_gradient, guess, Scalar(0.01 * settings.tolerance),
                                            settings.max_iterations, "galerkin interior extremum");
    const auto action = galerkin_action<Scalar>(cl, tab, t, {q0, inner.x, q2}, s0, tau);
    DiscreteLagrangianValue<Scalar> out;
    out.value = (action.s1 - s0) / tau;
    out.d_q0 = action.d_q[0] / tau;
    out.d_q1 = action.d_q[2] / tau;
    out.d_s0 = (action.d_s0 - 1) / tau;
    return out;
  };
  return Ld;
}

template <typename Scalar>
struct HerglotzStepResult {
  ContactState<Scalar> state;
  int iterations = 0;
  Scalar residual = 0;
};

/// One step of the discrete Herglotz equations.
///
/// With momenta p_k = -tau dLd/dq_k / (1 + tau dLd/ds_k) and
/// p_{k+1} = tau dLd/dq_{k+1}, the next position solves
/// tau dLd/dq_k + p_k (1 + tau dLd/ds_k) = 0; then s_{k+1} = s_k + tau Ld.
template <typename Scalar>
HerglotzStepResult<Scalar> herglotz_step(const DiscreteLagrangian<Scalar>& Ld, const ContactState<Scalar>& x, Scalar tau,
                                         const SolverSettings& settings,
                                         const std::optional<Vector<Scalar>>& guess = std::nullopt) {
  using Vec = Vector<Scalar>;
  require_dimension(Ld.dim, x);
  constexpr double kMinDenominator = 1e-10;
  auto residual = [&](const Vec& q1) -> Vec {
    const auto v = Ld.evaluate(x.t, x.q, q1, x.s, tau);
    return tau * v.d_q0 + x.p * (1 + tau * v.d_s0);
  };
  const Vec start = guess ? *guess : Vec(x.q + tau * x.p);
  const auto solved = newton_solve<Scalar>(residual, start, Scalar(settings.tolerance), settings.max_iterations,
                                           "herglotz step");
  const auto v = Ld.evaluate(x.t, x.q, solved.x, x.s, tau);
  if (std::abs(1 + tau * v.d_s0) < kMinDenominator) {
    throw DenominatorNearZero("herglotz step: 1 + tau dLd/ds is numerically zero");
  }
  HerglotzStepResult<Scalar> out;
  out.state.q = solved.x;
  out.state.p = tau * v.d_q1;
  out.state.s = x.s + tau * v.value;
  out.state.t = x.t + tau;
  out.iterations = solved.iterations;
  out.residual = solved.residual;
  detail::require_finite(out.state.p, "p", "herglotz step");
  return out;
}

/// Momentum p_k^+ implied by a step from x to q_next.
template <typename Scalar>
Vector<Scalar> forward_momentum(const DiscreteLagrangian<Scalar>& Ld, const ContactState<Scalar>& x,
                                const Vector<Scalar>& q_next, Scalar tau) {
  const auto v = Ld.evaluate(x.t, x.q, q_next, x.s, tau);
  const Scalar denom = 1 + tau * v.d_s0;
  if (std::abs(denom) < 1e-10) throw DenominatorNearZero("forward momentum: 1 + tau dLd/ds is numerically zero");
  return -tau * v.d_q0 / denom;
}

/// Stateful driver that keeps the previous position for the second-order
/// predictor q_{k+1} ~ 2 q_k - q_{k-1}.
template <typename Scalar>
class HerglotzIntegrator {
 public:
  HerglotzIntegrator(DiscreteLagrangian<Scalar> Ld, Scalar tau, SolverSettings settings = {})
      : Ld_(std::move(Ld)), tau_(tau), settings_(settings) {
    settings_.validate();
  }

  ContactState<Scalar> operator()(const ContactState<Scalar>& x) {
    std::optional<Vector<Scalar>> guess;
    if (settings_.initial_guess == SolverSettings::InitialGuess::Extrapolate && previous_q_ &&
        previous_q_->size() == x.q.size()) {
      guess = Vector<Scalar>(2 * x.q - *previous_q_);
    }
    auto result = herglotz_step(Ld_, x, tau_, settings_, guess);
    previous_q_ = x.q;
    last_iterations_ = result.iterations;
    return std::move(result.state);
  }

  void reset() { previous_q_.reset(); }
  int last_iterations() const { return last_iterations_; }

 private:
  DiscreteLagrangian<Scalar> Ld_;
  Scalar tau_;
  SolverSettings settings_;
  std::optional<Vector<Scalar>> previous_q_;
  int last_iterations_ = 0;
};

}  // namespace contact
