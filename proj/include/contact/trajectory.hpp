#pragma once

#include <functional>
#include <string>
#include <vector>

#include "contact/splitting.hpp"

namespace contact {

template <typename Scalar>
struct TrajectoryPoint {
  long step = 0;
  ContactState<Scalar> state;
};

/// Recorded states of one run. Integration failures are reported through
/// `status` so that partial output survives.
template <typename Scalar>
struct TrajectoryRecord {
  enum class Status { Ok, Diverged };

  std::vector<TrajectoryPoint<Scalar>> points;
  Scalar tau = 0;
  long stride = 1;
  long n_steps = 0;
  Status status = Status::Ok;
  long failure_step = -1;  // index of the step that failed
  std::string failure_message;

  bool ok() const { return status == Status::Ok; }
  const ContactState<Scalar>& final_state() const { return points.back().state; }
};

template <typename Scalar>
struct IntegrateOptions {
  long stride = 1;
  /// Extra stop condition evaluated on every accepted state; a non-empty
  /// return value aborts the run as diverged with that message. The
  /// offending state is kept as the last recorded point.
  std::function<std::string(const ContactState<Scalar>&)> abort_check;
  /// Called with (step, state) for the initial state and every accepted step,
  /// independent of the stride.
  std::function<void(long, const ContactState<Scalar>&)> observer;
};

/// Applies `step` n_steps times. After step k the clock is set to
/// t0 + k tau exactly, so round-off in the substep shifts does not accumulate.
template <typename Scalar, typename StepFn>
TrajectoryRecord<Scalar> integrate(const ContactState<Scalar>& x0, Scalar tau, long n_steps, StepFn&& step,
                                   const IntegrateOptions<Scalar>& options = {}) {
  if (n_steps < 1) throw InvalidArgument("integrate: n_steps must be >= 1");
  if (options.stride < 1) throw InvalidArgument("integrate: stride must be >= 1");
  if (!std::isfinite(tau) || tau == 0) throw InvalidArgument("integrate: tau must be finite and non-zero");

  TrajectoryRecord<Scalar> record;
  record.tau = tau;
  record.stride = options.stride;
  record.n_steps = n_steps;
  record.points.reserve(static_cast<std::size_t>(n_steps / options.stride + 2));
  record.points.push_back({0, x0});
  if (options.observer) options.observer(0, x0);

  ContactState<Scalar> x = x0;
  for (long k = 1; k <= n_steps; ++k) {
    std::string failure;
    bool keep = false;
    try {
      x = step(x);
      x.t = x0.t + static_cast<Scalar>(k) * tau;
      if (!x.is_finite()) {
        failure = "non-finite state";
      } else if (options.abort_check) {
        failure = options.abort_check(x);
        keep = true;
      }
    } catch (const NumericalError& e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      if (keep) record.points.push_back({k, x});
      record.status = TrajectoryRecord<Scalar>::Status::Diverged;
      record.failure_step = k;
      record.failure_message = failure;
      return record;
    }
    if (options.observer) options.observer(k, x);
    if (k % options.stride == 0 || k == n_steps) record.points.push_back({k, x});
  }
  return record;
}

/// Splitting integrator run with the given composition.
template <typename Scalar>
TrajectoryRecord<Scalar> integrate(const SeparableContactSystem<Scalar>& sys, const ContactState<Scalar>& x0, Scalar tau,
                                   long n_steps, const CompositionScheme<Scalar>& scheme,
                                   const IntegrateOptions<Scalar>& options = {}) {
  scheme.validate();
  return integrate(
      x0, tau, n_steps, [&](const ContactState<Scalar>& x) { return step_composed(sys, x, tau, scheme); }, options);
}

}  // namespace contact
