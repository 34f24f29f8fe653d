#pragma once

#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "contact/state.hpp"

namespace contact {

template <typename Scalar>
struct NewtonResult {
  Vector<Scalar> x;
  Scalar residual = 0;
  int iterations = 0;
};

/// Damped Newton iteration with a forward-difference Jacobian
/// (step 1e-7 * max(1, |x_i|)).
///
/// Converges when |R| < tolerance, or when the update stalls at round-off
/// level. Throws NonConvergence after max_iterations, or when the Jacobian is
/// singular.
template <typename Scalar, typename Residual>
NewtonResult<Scalar> newton_solve(Residual&& residual, Vector<Scalar> x, Scalar tolerance, int max_iterations,
                                  const char* what) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Vector<Scalar> r = residual(x);
  Scalar norm = r.norm();
  for (int it = 0; it < max_iterations; ++it) {
    if (!std::isfinite(norm)) throw NonConvergence(std::string(what) + ": residual is not finite", double(norm));
    if (norm < tolerance) return {x, norm, it};

    Matrix<Scalar> J(r.size(), x.size());
    Vector<Scalar> xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const Scalar h = Scalar(1e-7) * std::max(Scalar(1), std::abs(x(j)));
      xp(j) = x(j) + h;
      J.col(j) = (residual(xp) - r) / h;
      xp(j) = x(j);
    }
    Eigen::FullPivLU<Matrix<Scalar>> lu(J);
    if (!lu.isInvertible()) throw NonConvergence(std::string(what) + ": degenerate Jacobian", double(norm));
    const Vector<Scalar> dx = -lu.solve(r);

    Scalar damping = 1;
    bool improved = false;
    for (int halving = 0; halving < 10; ++halving, damping /= 2) {
      const Vector<Scalar> trial = x + damping * dx;
      const Vector<Scalar> rt = residual(trial);
      const Scalar nt = rt.norm();
      if (std::isfinite(nt) && nt < norm) {
        x = trial;
        r = rt;
        norm = nt;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // No decrease possible: accept if the full update is already at round-off.
      if (dx.norm() <= 16 * eps * (1 + x.norm())) return {x, norm, it + 1};
      throw NonConvergence(std::string(what) + ": line search failed", double(norm));
    }
    if (dx.norm() <= 4 * eps * (1 + x.norm())) return {x, norm, it + 1};
  }
  if (norm < tolerance) return {x, norm, max_iterations};
  throw NonConvergence(std::string(what) + ": no convergence after " + std::to_string(max_iterations) + " iterations",
                       double(norm));
}

}  // namespace contact
