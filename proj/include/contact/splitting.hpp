#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "contact/hamiltonian.hpp"

namespace contact {

// Exact flows of the three pieces of H = |p|^2/2 + V(q, t) + f(t) s and of
// d/dt. Time is frozen inside every phase-space flow; only time_shift moves it.

template <typename Scalar>
ContactState<Scalar> flow_kinetic(ContactState<Scalar> x, Scalar h) {
  x.s += h * x.p.squaredNorm() / 2;
  x.q += h * x.p;
  return x;
}

template <typename Scalar>
ContactState<Scalar> flow_potential(const SeparableContactSystem<Scalar>& sys, ContactState<Scalar> x, Scalar h) {
  const Vector<Scalar> g = sys.gradient(x.q, x.t);
  const Scalar V = sys.potential(x.q, x.t);
  detail::require_finite(g, "q", "grad V");
  detail::require_finite(V, "V", "V");
  x.p -= h * g;
  x.s -= h * V;
  return x;
}

template <typename Scalar>
ContactState<Scalar> flow_damping(const SeparableContactSystem<Scalar>& sys, ContactState<Scalar> x, Scalar h) {
  const Scalar f = sys.damping(x.t);
  detail::require_finite(f, "t", "f");
  const Scalar factor = std::exp(-h * f);
  if (!std::isfinite(factor)) throw EvaluationError("s", "damping flow factor overflowed");
  x.p *= factor;
  x.s *= factor;
  return x;
}

template <typename Scalar>
ContactState<Scalar> time_shift(ContactState<Scalar> x, Scalar h) {
  x.t += h;
  return x;
}

struct SplitFlowStep {
  enum class Kind { TimeShift, DampingFlow, PotentialKick, KineticDrift };
  Kind kind;
  double fraction;  // multiple of the step tau
};

/// Substeps of the symmetric second-order step, in application order:
/// shift(1/2) drift(1/2) kick(1/2) damp(1) kick(1/2) drift(1/2) shift(1/2).
inline constexpr std::array<SplitFlowStep, 7> s2_substeps() {
  using K = SplitFlowStep::Kind;
  return {{{K::TimeShift, 0.5},
           {K::KineticDrift, 0.5},
           {K::PotentialKick, 0.5},
           {K::DampingFlow, 1.0},
           {K::PotentialKick, 0.5},
           {K::KineticDrift, 0.5},
           {K::TimeShift, 0.5}}};
}

template <typename Scalar>
ContactState<Scalar> apply_substep(const SeparableContactSystem<Scalar>& sys, const ContactState<Scalar>& x,
                                   SplitFlowStep sub, Scalar tau) {
  const Scalar h = static_cast<Scalar>(sub.fraction) * tau;
  switch (sub.kind) {
    case SplitFlowStep::Kind::TimeShift:
      return time_shift(x, h);
    case SplitFlowStep::Kind::DampingFlow:
      return flow_damping(sys, x, h);
    case SplitFlowStep::Kind::PotentialKick:
      return flow_potential(sys, x, h);
    case SplitFlowStep::Kind::KineticDrift:
      return flow_kinetic(x, h);
  }
  return x;
}

/// Second-order contact splitting step.
template <typename Scalar>
ContactState<Scalar> step_s2(const SeparableContactSystem<Scalar>& sys, ContactState<Scalar> x, Scalar tau) {
  if (!std::isfinite(tau) || tau == 0) throw InvalidArgument("step_s2: tau must be finite and non-zero");
  for (const auto& sub : s2_substeps()) x = apply_substep(sys, x, sub, tau);
  return x;
}

/// Symmetric composition of S2 steps: S2(c_k tau) ... S2(c_1 tau).
template <typename Scalar>
struct CompositionScheme {
  enum class Provenance { BaseSecondOrder, ExactRecursive, TableA, TableB, TableC };

  int order = 2;
  std::vector<Scalar> stages{Scalar(1)};
  Provenance provenance = Provenance::BaseSecondOrder;

  Scalar stage_sum() const {
    Scalar sum = 0;
    for (Scalar c : stages) sum += c;
    return sum;
  }

  bool is_palindromic() const {
    for (std::size_t i = 0; i < stages.size() / 2; ++i) {
      if (stages[i] != stages[stages.size() - 1 - i]) return false;
    }
    return true;
  }

  void validate() const {
    if (order < 2 || order % 2 != 0) throw InvalidArgument("composition order must be even and >= 2");
    if (stages.empty()) throw InvalidArgument("composition has no stages");
    if (std::abs(stage_sum() - 1) > Scalar(1e-12)) throw InvalidArgument("composition stages must sum to 1");
    if (!is_palindromic()) throw InvalidArgument("composition stages must be palindromic");
  }
};

template <typename Scalar>
CompositionScheme<Scalar> base_scheme() {
  return {};
}

/// Triple-jump coefficients (z1, z0) raising order 2n to 2n + 2.
template <typename Scalar>
std::pair<Scalar, Scalar> triple_jump_coefficients(int n) {
  const Scalar root = std::pow(Scalar(2), Scalar(1) / Scalar(2 * n + 1));
  return {Scalar(1) / (2 - root), -root / (2 - root)};
}

template <typename Scalar>
CompositionScheme<Scalar> yoshida_exact(const CompositionScheme<Scalar>& inner) {
  if (inner.order % 2 != 0) throw InvalidArgument("yoshida_exact needs an even-order inner scheme");
  const auto [z1, z0] = triple_jump_coefficients<Scalar>(inner.order / 2);
  CompositionScheme<Scalar> out;
  out.order = inner.order + 2;
  out.provenance = CompositionScheme<Scalar>::Provenance::ExactRecursive;
  out.stages.clear();
  out.stages.reserve(3 * inner.stages.size());
  for (Scalar z : {z1, z0, z1}) {
    for (Scalar c : inner.stages) out.stages.push_back(z * c);
  }
  return out;
}

/// Recursive triple-jump scheme of the requested even order.
template <typename Scalar>
CompositionScheme<Scalar> yoshida_exact_of_order(int order) {
  if (order < 2 || order % 2 != 0) throw InvalidArgument("yoshida order must be even and >= 2");
  auto scheme = base_scheme<Scalar>();
  while (scheme.order < order) scheme = yoshida_exact(scheme);
  return scheme;
}

enum class YoshidaTable { A, B, C };

/// Sixth-order schemes from tabulated approximate coefficients; w0 is derived
/// from 1 - 2 (w1 + w2 + w3).
template <typename Scalar>
CompositionScheme<Scalar> yoshida_table(YoshidaTable which) {
  using P = typename CompositionScheme<Scalar>::Provenance;
  std::array<Scalar, 3> w{};  // w1, w2, w3
  P provenance = P::TableA;
  switch (which) {
    case YoshidaTable::A:
      w = {Scalar(-1.17767998417887), Scalar(0.235573213359357), Scalar(0.784513610477560)};
      break;
    case YoshidaTable::B:
      w = {Scalar(-2.13228522200144), Scalar(0.00426068187079180), Scalar(1.43984816797678)};
      provenance = P::TableB;
      break;
    case YoshidaTable::C:
      w = {Scalar(0.00152886228424922), Scalar(-2.14403531630539), Scalar(1.44778256239930)};
      provenance = P::TableC;
      break;
  }
  const Scalar w0 = 1 - 2 * (w[0] + w[1] + w[2]);
  CompositionScheme<Scalar> out;
  out.order = 6;
  out.provenance = provenance;
  out.stages = {w[2], w[1], w[0], w0, w[0], w[1], w[2]};
  return out;
}

template <typename Scalar>
ContactState<Scalar> step_composed(const SeparableContactSystem<Scalar>& sys, ContactState<Scalar> x, Scalar tau,
                                   const CompositionScheme<Scalar>& scheme) {
  for (Scalar c : scheme.stages) x = step_s2(sys, std::move(x), c * tau);
  return x;
}

}  // namespace contact
