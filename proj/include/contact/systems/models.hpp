#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "contact/hamiltonian.hpp"

namespace contact::systems {

using System = SeparableContactSystem<double>;
using State = ContactStated;
using Vec = Vector<double>;

/// A named model: the system, recommended initial data and, when known, the
/// exact solution through that initial data.
struct ModelDescriptor {
  std::string name;
  Eigen::Index dim = 0;
  std::map<std::string, double> parameters;
  System system;
  State initial;
  std::function<State(double)> exact;  // empty when no closed form is known
  std::vector<bool> angular;           // per q coordinate: reduce mod 2 pi in sections
  bool singular_at_start = false;      // f(t) blows up at the initial time
  /// Optional escape test; returns a non-empty message once the orbit has left
  /// the region where the model is meaningful.
  std::function<std::string(const State&)> escape;

  bool has_exact() const { return static_cast<bool>(exact); }
};

// Damped harmonic oscillator H = p^2/2 + q^2/2 + alpha s.
ModelDescriptor make_damped_oscillator(double alpha);
ModelDescriptor make_damped_oscillator(double alpha, const State& initial);

/// Closed-form q(t), p(t) of q'' + alpha q' + q = 0 through (q0, p0) at t0.
/// s(t) is obtained by Gauss-Legendre quadrature of sdot = L along the orbit.
State damped_oscillator_solution(double alpha, const State& initial, double t);

struct KeplerParameters {
  double alpha = -0.01;
  double Omega = 2 * 3.14159265358979323846;
  double gamma = 1.0;
  double eccentricity = 0.0;
  double collision_radius = 1e-6;
  double escape_radius = 100.0;  // |q| beyond this flags the run as diverged
};

/// H = |p|^2/2 - gamma/|q| + alpha sin(Omega t) s, started at periapsis of the
/// unperturbed orbit with the requested eccentricity.
ModelDescriptor make_perturbed_kepler(const KeplerParameters& params);

/// Periapsis initial state of a Kepler orbit with eccentricity e and unit
/// semi-major axis scale (periapsis distance 1 - e).
State kepler_periapsis_state(double eccentricity, double gamma);

/// Fourier coefficients W(m/2, e) of (a/r)^3 exp(2 i f) over the mean anomaly.
struct CayleyTable {
  double eccentricity = 0;
  int m_min = 0;
  int m_max = 0;
  int quad_points = 0;
  double truncation_tolerance = 0;
  std::vector<double> values;  // index m - m_min; the m = 0 slot is unused
  double tail_estimate = 0;    // sum of |W| dropped by the truncation and range

  double coefficient(int m) const;
  /// Indices kept after truncation (|W| >= tolerance, m != 0).
  std::vector<int> active() const;
};

/// Solves M = E - e sin E for E by Newton (tolerance 1e-14).
double solve_kepler_equation(double mean_anomaly, double eccentricity);

CayleyTable cayley_coefficients(double eccentricity, int m_min, int m_max, int quad_points = 512,
                                double truncation_tolerance = 0.0);

struct SpinOrbitParameters {
  double Ctilde = 1.0;
  double lambda = 0.001;
  double Omega = 1.0;
  double nu = 1.0;
  double BmA = 0.01;
  double eccentricity = 0.01;
  double a = 0.0;
  double mu = 0.0;
  int m_min = -8;
  int m_max = 8;
  int quad_points = 512;
  double truncation_tolerance = 1e-14;
  double theta0 = 0.0;
  double theta_dot0 = 1.0;
};

/// Spin-orbit model with C(t) = Ctilde + lambda cos(Omega t):
///   f(t) = -a - lambda Omega sin(Omega t) / C(t)
///   dV/dtheta = -mu + (3/2) nu (B - A) / C(t) sum_m W(m/2, e) sin(2 theta - m t)
/// with V = -mu theta - (3/4) nu (B - A) / C(t) sum_m W cos(2 theta - m t).
ModelDescriptor make_spin_orbit(const SpinOrbitParameters& params);
/// Same, reusing a precomputed coefficient table.
ModelDescriptor make_spin_orbit(const SpinOrbitParameters& params, const CayleyTable& table);

/// Lane-Emden H = p^2/2 + y^(n+1)/(n+1) + (2/x) s from y = 1, p = 0, s = 0 at x = 0.
/// Exact solutions are attached for n in {0, 1, 5}.
ModelDescriptor make_lane_emden(double n_index);

/// Registry used by the command-line harness.
struct ModelInfo {
  std::string name;
  std::map<std::string, double> defaults;
  std::string summary;
};

const std::vector<ModelInfo>& model_catalogue();

/// Builds a model by name; unknown parameter keys raise InvalidArgument.
ModelDescriptor make_model(const std::string& name, const std::map<std::string, double>& parameters);

/// Composite Gauss-Legendre quadrature on [a, b] with panels no wider than `panel`.
double gauss_legendre(const std::function<double(double)>& fn, double a, double b, double panel = 0.05);

}  // namespace contact::systems
