#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "contact/state.hpp"

namespace contact {

/// Central-difference step eps^(1/3) * max(1, |x|).
template <typename Scalar>
Scalar fd_step(Scalar x) {
  static const Scalar base = std::cbrt(std::numeric_limits<Scalar>::epsilon());
  return base * std::max(Scalar(1), std::abs(x));
}

/// Central-difference gradient of a scalar function of a vector.
template <typename Scalar, typename Fn>
Vector<Scalar> central_gradient(Fn&& fn, const Vector<Scalar>& x) {
  Vector<Scalar> g(x.size());
  Vector<Scalar> xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Scalar h = fd_step(x(i));
    xp(i) = x(i) + h;
    const Scalar fp = fn(xp);
    xp(i) = x(i) - h;
    const Scalar fm = fn(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

/// Central-difference derivative of a scalar function of a scalar.
template <typename Scalar, typename Fn>
Scalar central_derivative(Fn&& fn, Scalar x) {
  const Scalar h = fd_step(x);
  return (fn(x + h) - fn(x - h)) / (2 * h);
}

/// Central-difference Jacobian of a vector map with fixed step h.
template <typename Scalar, typename Map>
Matrix<Scalar> central_jacobian(Map&& map, const Vector<Scalar>& z, Scalar h) {
  const Vector<Scalar> f0 = map(z);
  Matrix<Scalar> J(f0.size(), z.size());
  Vector<Scalar> zp = z;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    zp(j) = z(j) + h;
    const Vector<Scalar> fp = map(zp);
    zp(j) = z(j) - h;
    const Vector<Scalar> fm = map(zp);
    zp(j) = z(j);
    J.col(j) = (fp - fm) / (2 * h);
  }
  return J;
}

/// Relative mismatch used by the consistency checks: |a - b| / max(1, |b|).
template <typename Scalar>
Scalar relative_mismatch(Scalar approx, Scalar exact) {
  return std::abs(approx - exact) / std::max(Scalar(1), std::abs(exact));
}

}  // namespace contact
