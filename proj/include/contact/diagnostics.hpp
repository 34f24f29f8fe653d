#pragma once

#include "contact/finite_difference.hpp"
#include "contact/hamiltonian.hpp"

namespace contact {

/// Covector of the contact form ds - p dq at x, in (q, p, s) components.
template <typename Scalar>
Vector<Scalar> contact_form(const ContactState<Scalar>& x) {
  const Eigen::Index n = x.dim();
  Vector<Scalar> eta = Vector<Scalar>::Zero(2 * n + 1);
  eta.head(n) = -x.p;
  eta(2 * n) = 1;
  return eta;
}

struct PullbackReport {
  double residual = 0;  // |Phi^* eta - lambda eta| after orthogonal projection
  double lambda = 0;    // conformal factor
};

/// Measures how far a one-step map is from being a contact transformation.
///
/// The Jacobian of `step` is taken by central differences in (q, p, s) with t
/// held fixed; the pulled-back form is projected onto eta at x and the
/// orthogonal remainder is returned.
template <typename Scalar, typename StepFn>
PullbackReport contact_pullback_residual(StepFn&& step, const ContactState<Scalar>& x, Scalar h = Scalar(1e-5)) {
  auto map = [&](const Vector<Scalar>& z) { return step(ContactState<Scalar>::from_phase(z, x.t)).phase(); };
  const Matrix<Scalar> J = central_jacobian<Scalar>(map, x.phase(), h);
  const ContactState<Scalar> image = step(x);
  const Vector<Scalar> pulled = J.transpose() * contact_form(image);
  const Vector<Scalar> eta = contact_form(x);
  const Scalar lambda = pulled.dot(eta) / eta.squaredNorm();
  return {static_cast<double>((pulled - lambda * eta).norm()), static_cast<double>(lambda)};
}

/// Lie bracket [X, Y] = DY X - DX Y of two vector fields on (q, p, s) by
/// central differences with step h.
template <typename Scalar, typename FieldX, typename FieldY>
Vector<Scalar> lie_bracket_fd(FieldX&& X, FieldY&& Y, const Vector<Scalar>& z, Scalar h) {
  const Matrix<Scalar> DX = central_jacobian<Scalar>(X, z, h);
  const Matrix<Scalar> DY = central_jacobian<Scalar>(Y, z, h);
  return DY * X(z) - DX * Y(z);
}

/// X_H as a flat field on (q, p, s) at fixed time t.
template <typename Scalar>
auto flat_vector_field(const GeneralContactHamiltonian<Scalar>& H, Scalar t) {
  return [H, t](const Vector<Scalar>& z) { return contact_vector_field(H, ContactState<Scalar>::from_phase(z, t)).flat(); };
}

}  // namespace contact
