#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "contact/errors.hpp"

namespace contact {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Point (q, p, s) of the extended phase space in Darboux coordinates, plus
/// the current time t.
template <typename Scalar>
struct ContactState {
  Vector<Scalar> q;
  Vector<Scalar> p;
  Scalar s{0};
  Scalar t{0};

  Eigen::Index dim() const { return q.size(); }

  bool is_finite() const { return q.allFinite() && p.allFinite() && std::isfinite(s) && std::isfinite(t); }

  /// Flattened (q, p, s); t is not a phase-space coordinate.
  Vector<Scalar> phase() const {
    Vector<Scalar> out(2 * dim() + 1);
    out << q, p, s;
    return out;
  }

  static ContactState from_phase(const Eigen::Ref<const Vector<Scalar>>& z, Scalar t) {
    const Eigen::Index n = (z.size() - 1) / 2;
    return ContactState{z.head(n), z.segment(n, n), z(2 * n), t};
  }
};

using ContactStated = ContactState<double>;

/// Builds a state and checks the shape and finiteness invariants.
template <typename Scalar>
ContactState<Scalar> make_state(Vector<Scalar> q, Vector<Scalar> p, Scalar s = 0, Scalar t = 0) {
  if (q.size() == 0) throw InvalidArgument("contact state needs at least one degree of freedom");
  if (q.size() != p.size()) throw InvalidArgument("q and p must have identical length");
  ContactState<Scalar> x{std::move(q), std::move(p), s, t};
  if (!x.is_finite()) throw InvalidArgument("contact state has non-finite components");
  return x;
}

/// Tangent vector (dq, dp, ds) at a point of the extended phase space.
template <typename Scalar>
struct PhaseVector {
  Vector<Scalar> dq;
  Vector<Scalar> dp;
  Scalar ds{0};

  Vector<Scalar> flat() const {
    Vector<Scalar> out(dq.size() + dp.size() + 1);
    out << dq, dp, ds;
    return out;
  }

  Scalar norm() const { return std::sqrt(dq.squaredNorm() + dp.squaredNorm() + ds * ds); }
};

namespace detail {

template <typename Scalar>
void require_finite(const Vector<Scalar>& v, const char* name, const char* where) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw EvaluationError(std::string(name) + "[" + std::to_string(i) + "]", std::string(where) + " returned a non-finite value");
    }
  }
}

template <typename Scalar>
void require_finite(Scalar v, const char* name, const char* where) {
  if (!std::isfinite(v)) throw EvaluationError(name, std::string(where) + " returned a non-finite value");
}

}  // namespace detail

}  // namespace contact
