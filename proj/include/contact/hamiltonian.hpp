#pragma once

#include <functional>
#include <optional>
#include <span>

#include "contact/finite_difference.hpp"
#include "contact/state.hpp"

namespace contact {

/// Arbitrary contact Hamiltonian H(q, p, s, t) with its first partials.
template <typename Scalar>
struct GeneralContactHamiltonian {
  using State = ContactState<Scalar>;
  using ScalarFn = std::function<Scalar(const State&)>;
  using VectorFn = std::function<Vector<Scalar>(const State&)>;

  Eigen::Index dim = 0;
  ScalarFn value;
  VectorFn dH_dq;
  VectorFn dH_dp;
  ScalarFn dH_ds;
};

/// The canonical dissipative class H = |p|^2/2 + V(q, t) + f(t) s.
///
/// Only V, grad V and f are needed for integration. Error analysis needs the
/// full set of second derivatives; they are grouped so that a system either
/// has all of them or none.
template <typename Scalar>
struct SeparableContactSystem {
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;
  using PotentialFn = std::function<Scalar(const Vec&, Scalar)>;
  using GradientFn = std::function<Vec(const Vec&, Scalar)>;
  using HessianFn = std::function<Mat(const Vec&, Scalar)>;
  using TimeFn = std::function<Scalar(Scalar)>;

  struct SecondDerivatives {
    PotentialFn dV_dt;
    HessianFn hessian;      // d2V/dq dq
    GradientFn dgrad_dt;    // d2V/dq dt
    PotentialFn d2V_dt2;
    TimeFn df_dt;
    TimeFn d2f_dt2;
  };

  Eigen::Index dim = 0;
  PotentialFn potential;
  GradientFn gradient;
  TimeFn damping;
  std::optional<SecondDerivatives> second;

  bool has_second_derivatives() const { return second.has_value(); }

  Scalar energy(const ContactState<Scalar>& x) const {
    return x.p.squaredNorm() / 2 + potential(x.q, x.t) + damping(x.t) * x.s;
  }
};

template <typename Scalar>
void require_dimension(Eigen::Index expected, const ContactState<Scalar>& x) {
  if (x.q.size() != expected || x.p.size() != expected) {
    throw InvalidArgument("state dimension " + std::to_string(x.q.size()) + " does not match system dimension " +
                          std::to_string(expected));
  }
}

/// X_H at x: (dH/dp, -dH/dq - p dH/ds, p . dH/dp - H).
template <typename Scalar>
PhaseVector<Scalar> contact_vector_field(const GeneralContactHamiltonian<Scalar>& sys, const ContactState<Scalar>& x) {
  require_dimension(sys.dim, x);
  const Scalar H = sys.value(x);
  const Vector<Scalar> Hq = sys.dH_dq(x);
  const Vector<Scalar> Hp = sys.dH_dp(x);
  const Scalar Hs = sys.dH_ds(x);
  detail::require_finite(H, "H", "Hamiltonian");
  detail::require_finite(Hq, "q", "dH/dq");
  detail::require_finite(Hp, "p", "dH/dp");
  detail::require_finite(Hs, "s", "dH/ds");
  return {Hp, -Hq - x.p * Hs, x.p.dot(Hp) - H};
}

/// Jacobi bracket {g, f} in Darboux coordinates.
template <typename Scalar>
Scalar jacobi_bracket(const GeneralContactHamiltonian<Scalar>& g, const GeneralContactHamiltonian<Scalar>& f,
                      const ContactState<Scalar>& x) {
  if (g.dim != f.dim) throw InvalidArgument("jacobi_bracket: Hamiltonians of different dimension");
  require_dimension(g.dim, x);
  const Scalar gv = g.value(x), fv = f.value(x);
  const Scalar gs = g.dH_ds(x), fs = f.dH_ds(x);
  const Vector<Scalar> gq = g.dH_dq(x), gp = g.dH_dp(x);
  const Vector<Scalar> fq = f.dH_dq(x), fp = f.dH_dp(x);
  detail::require_finite(gv, "g", "g");
  detail::require_finite(fv, "f", "f");
  const Scalar result = (gv * fs - gs * fv) + x.p.dot(gs * fp - gp * fs) + (gq.dot(fp) - gp.dot(fq));
  detail::require_finite(result, "bracket", "jacobi_bracket");
  return result;
}

/// Assembles H = |p|^2/2 + V(q, t) + f(t) s with analytic partials.
template <typename Scalar>
GeneralContactHamiltonian<Scalar> canonical_hamiltonian(const SeparableContactSystem<Scalar>& sys) {
  GeneralContactHamiltonian<Scalar> H;
  H.dim = sys.dim;
  H.value = [sys](const ContactState<Scalar>& x) { return sys.energy(x); };
  H.dH_dq = [sys](const ContactState<Scalar>& x) { return sys.gradient(x.q, x.t); };
  H.dH_dp = [](const ContactState<Scalar>& x) { return x.p; };
  H.dH_ds = [sys](const ContactState<Scalar>& x) { return sys.damping(x.t); };
  return H;
}

/// Worst relative mismatch between the analytic derivative evaluators of
/// `sys` and central differences of the lower-order evaluators, over the
/// probe states.
template <typename Scalar>
Scalar derivative_consistency(const SeparableContactSystem<Scalar>& sys, std::span<const ContactState<Scalar>> probes) {
  using Vec = Vector<Scalar>;
  Scalar worst = 0;
  auto track = [&](Scalar approx, Scalar exact) { worst = std::max(worst, relative_mismatch(approx, exact)); };
  for (const auto& x : probes) {
    const Vec g = sys.gradient(x.q, x.t);
    const Vec g_fd = central_gradient<Scalar>([&](const Vec& q) { return sys.potential(q, x.t); }, x.q);
    for (Eigen::Index i = 0; i < g.size(); ++i) track(g_fd(i), g(i));
    if (!sys.second) continue;
    const auto& d2 = *sys.second;
    track(central_derivative<Scalar>([&](Scalar t) { return sys.potential(x.q, t); }, x.t), d2.dV_dt(x.q, x.t));
    track(central_derivative<Scalar>([&](Scalar t) { return sys.damping(t); }, x.t), d2.df_dt(x.t));
    track(central_derivative<Scalar>([&](Scalar t) { return d2.df_dt(t); }, x.t), d2.d2f_dt2(x.t));
    track(central_derivative<Scalar>([&](Scalar t) { return d2.dV_dt(x.q, t); }, x.t), d2.d2V_dt2(x.q, x.t));
    const Matrix<Scalar> hess = d2.hessian(x.q, x.t);
    const Vec gt = d2.dgrad_dt(x.q, x.t);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const Vec row = central_gradient<Scalar>([&](const Vec& q) { return sys.gradient(q, x.t)(i); }, x.q);
      for (Eigen::Index j = 0; j < g.size(); ++j) track(row(j), hess(i, j));
      track(central_derivative<Scalar>([&](Scalar t) { return sys.gradient(x.q, t)(i); }, x.t), gt(i));
    }
  }
  return worst;
}

/// Same check for a general Hamiltonian's first partials.
template <typename Scalar>
Scalar derivative_consistency(const GeneralContactHamiltonian<Scalar>& H, std::span<const ContactState<Scalar>> probes) {
  using Vec = Vector<Scalar>;
  Scalar worst = 0;
  for (const auto& x : probes) {
    auto with_q = [&](const Vec& q) { auto y = x; y.q = q; return H.value(y); };
    auto with_p = [&](const Vec& p) { auto y = x; y.p = p; return H.value(y); };
    auto with_s = [&](Scalar s) { auto y = x; y.s = s; return H.value(y); };
    const Vec gq = central_gradient<Scalar>(with_q, x.q), gp = central_gradient<Scalar>(with_p, x.p);
    const Vec aq = H.dH_dq(x), ap = H.dH_dp(x);
    for (Eigen::Index i = 0; i < gq.size(); ++i) {
      worst = std::max({worst, relative_mismatch(gq(i), aq(i)), relative_mismatch(gp(i), ap(i))});
    }
    worst = std::max(worst, relative_mismatch(central_derivative<Scalar>(with_s, x.s), H.dH_ds(x)));
  }
  return worst;
}

}  // namespace contact
