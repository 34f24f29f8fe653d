#pragma once

#include <limits>
#include <vector>

#include "contact/trajectory.hpp"

namespace contact {

/// Second-order correction Delta H' to the Hamiltonian traced by the S2
/// splitting step (pieces f(t) s, V(q, t), |p|^2/2; kinetic drift outermost):
///
///   Delta H' = -1/12 [ f' (|p|^2/2 - V) - f^2 (|p|^2/2 + V) + f (V_t - p.grad V)
///                      + p.(H_V p)/2 + p.grad V_t - |grad V|^2 + V_tt/2 + s f''/2 ].
template <typename Scalar>
class ModifiedHamiltonianEvaluator {
 public:
  explicit ModifiedHamiltonianEvaluator(SeparableContactSystem<Scalar> sys) : sys_(std::move(sys)) {
    if (!sys_.has_second_derivatives()) {
      throw MissingDerivative("modified Hamiltonian needs the second-derivative evaluators of the system");
    }
  }

  const SeparableContactSystem<Scalar>& system() const { return sys_; }

  Scalar operator()(const ContactState<Scalar>& x) const {
    require_dimension(sys_.dim, x);
    const auto& d2 = *sys_.second;
    const Scalar t = x.t;
    const Scalar kinetic = x.p.squaredNorm() / 2;
    const Scalar V = sys_.potential(x.q, t);
    const Vector<Scalar> grad = sys_.gradient(x.q, t);
    const Scalar f = sys_.damping(t);
    const Scalar bracket = d2.df_dt(t) * (kinetic - V) - f * f * (kinetic + V) + f * (d2.dV_dt(x.q, t) - x.p.dot(grad)) +
                           x.p.dot(d2.hessian(x.q, t) * x.p) / 2 + x.p.dot(d2.dgrad_dt(x.q, t)) - grad.squaredNorm() +
                           d2.d2V_dt2(x.q, t) / 2 + x.s * d2.d2f_dt2(t) / 2;
    const Scalar out = -bracket / 12;
    detail::require_finite(out, "t", "modified Hamiltonian");
    return out;
  }

  /// X_{Delta H'} with the partials of Delta H' taken by central differences.
  PhaseVector<Scalar> vector_field(const ContactState<Scalar>& x) const {
    using Vec = Vector<Scalar>;
    const Scalar G = (*this)(x);
    const Vec Gq = central_gradient<Scalar>([&](const Vec& q) { auto y = x; y.q = q; return (*this)(y); }, x.q);
    const Vec Gp = central_gradient<Scalar>([&](const Vec& p) { auto y = x; y.p = p; return (*this)(y); }, x.p);
    const Scalar Gs = central_derivative<Scalar>([&](Scalar s) { auto y = x; y.s = s; return (*this)(y); }, x.s);
    return {Gp, -Gq - x.p * Gs, x.p.dot(Gp) - G};
  }

 private:
  SeparableContactSystem<Scalar> sys_;
};

template <typename Scalar>
Scalar modified_hamiltonian(const SeparableContactSystem<Scalar>& sys, const ContactState<Scalar>& x) {
  return ModifiedHamiltonianEvaluator<Scalar>(sys)(x);
}

/// Per-coordinate local error magnitudes tau^3 |X_{Delta H'} z| at the pre-step state.
template <typename Scalar>
struct StepErrorEstimate {
  Vector<Scalar> dq;
  Vector<Scalar> dp;
  Scalar ds = 0;
  long step = 0;
  Scalar time = 0;

  Scalar norm() const { return std::sqrt(dq.squaredNorm() + dp.squaredNorm() + ds * ds); }
};

template <typename Scalar>
StepErrorEstimate<Scalar> local_error_estimate(const ModifiedHamiltonianEvaluator<Scalar>& dh, const ContactState<Scalar>& x,
                                               Scalar tau, long step = 0) {
  const PhaseVector<Scalar> X = dh.vector_field(x);
  const Scalar tau3 = tau * tau * tau;
  StepErrorEstimate<Scalar> out;
  out.dq = tau3 * X.dq.cwiseAbs();
  out.dp = tau3 * X.dp.cwiseAbs();
  out.ds = tau3 * std::abs(X.ds);
  out.step = step;
  out.time = x.t;
  return out;
}

template <typename Scalar>
StepErrorEstimate<Scalar> local_error_estimate(const SeparableContactSystem<Scalar>& sys, const ContactState<Scalar>& x,
                                               Scalar tau) {
  return local_error_estimate(ModifiedHamiltonianEvaluator<Scalar>(sys), x, tau);
}

template <typename Scalar>
struct ErrorBoundOptions {
  /// States earlier than this are evaluated at this time instead. Used for
  /// systems singular at t = 0, whose first step is accounted at t = tau.
  Scalar min_time = -std::numeric_limits<Scalar>::infinity();
};

/// Local estimate for the step leaving `x`, honouring ErrorBoundOptions.
template <typename Scalar>
StepErrorEstimate<Scalar> step_estimate(const ModifiedHamiltonianEvaluator<Scalar>& dh, const ContactState<Scalar>& x,
                                        Scalar tau, long step, const ErrorBoundOptions<Scalar>& options = {}) {
  if (x.t >= options.min_time) return local_error_estimate(dh, x, tau, step);
  auto shifted = x;
  shifted.t = options.min_time;
  return local_error_estimate(dh, shifted, tau, step);
}

/// Running sum of tau^3 |X_{Delta H'}(x_j)| (Euclidean over (dq, dp, ds)).
/// Entry j is the bound after j steps; entry 0 is zero.
template <typename Scalar>
std::vector<Scalar> accumulate_error_bound(const TrajectoryRecord<Scalar>& traj, const ModifiedHamiltonianEvaluator<Scalar>& dh,
                                           Scalar tau, const ErrorBoundOptions<Scalar>& options = {}) {
  if (traj.stride != 1) throw InvalidArgument("accumulate_error_bound needs every step recorded (stride 1)");
  std::vector<Scalar> bound;
  if (traj.points.empty()) return bound;
  bound.reserve(traj.points.size());
  bound.push_back(0);
  for (std::size_t j = 0; j + 1 < traj.points.size(); ++j) {
    bound.push_back(bound.back() + step_estimate(dh, traj.points[j].state, tau, long(j), options).norm());
  }
  return bound;
}

/// Classical RK4 on the first-order system qdot = p, pdot = -grad V - f p,
/// sdot = |p|^2/2 - V - f s.
template <typename Scalar>
ContactState<Scalar> rk4_step(const SeparableContactSystem<Scalar>& sys, const ContactState<Scalar>& x, Scalar tau) {
  using Vec = Vector<Scalar>;
  const Eigen::Index n = x.dim();
  auto rhs = [&](Scalar t, const Vec& z) {
    const Vec q = z.head(n), p = z.segment(n, n);
    const Scalar f = sys.damping(t);
    Vec out(2 * n + 1);
    out.head(n) = p;
    out.segment(n, n) = -sys.gradient(q, t) - f * p;
    out(2 * n) = p.squaredNorm() / 2 - sys.potential(q, t) - f * z(2 * n);
    return out;
  };
  const Vec z = x.phase();
  const Vec k1 = rhs(x.t, z);
  const Vec k2 = rhs(x.t + tau / 2, z + tau / 2 * k1);
  const Vec k3 = rhs(x.t + tau / 2, z + tau / 2 * k2);
  const Vec k4 = rhs(x.t + tau, z + tau * k3);
  return ContactState<Scalar>::from_phase(z + tau / 6 * (k1 + 2 * k2 + 2 * k3 + k4), x.t + tau);
}

template <typename Scalar>
TrajectoryRecord<Scalar> rk4_reference(const SeparableContactSystem<Scalar>& sys, const ContactState<Scalar>& x0, Scalar tau,
                                       long n_steps, const IntegrateOptions<Scalar>& options = {}) {
  return integrate(x0, tau, n_steps, [&](const ContactState<Scalar>& x) { return rk4_step(sys, x, tau); }, options);
}

}  // namespace contact
