#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "contact/contact.hpp"

namespace testing {

using contact::ContactStated;
using Vec = contact::Vector<double>;
using Mat = contact::Matrix<double>;
using System = contact::SeparableContactSystem<double>;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline ContactStated state(std::initializer_list<double> q, std::initializer_list<double> p, double s = 0, double t = 0) {
  return contact::make_state<double>(vec(q), vec(p), s, t);
}

inline ContactStated random_state(std::mt19937_64& rng, Eigen::Index n, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Vec q(n), p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i) = u(rng);
    p(i) = u(rng);
  }
  return contact::make_state<double>(q, p, u(rng), u(rng));
}

// q'' + alpha q' + q = 0 built here, not taken from the model catalogue.
inline System oscillator(double alpha) {
  System sys;
  sys.dim = 1;
  sys.potential = [](const Vec& q, double) { return q.squaredNorm() / 2; };
  sys.gradient = [](const Vec& q, double) -> Vec { return q; };
  sys.damping = [alpha](double) { return alpha; };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double) { return 0.0; };
  d2.hessian = [](const Vec&, double) -> Mat { return Mat::Identity(1, 1); };
  d2.dgrad_dt = [](const Vec&, double) -> Vec { return Vec::Zero(1); };
  d2.d2V_dt2 = [](const Vec&, double) { return 0.0; };
  d2.df_dt = [](double) { return 0.0; };
  d2.d2f_dt2 = [](double) { return 0.0; };
  sys.second = d2;
  return sys;
}

// H = |p|^2/2 - 1/|q| + alpha sin(Omega t) s in the plane.
inline System kepler(double alpha, double Omega) {
  System sys;
  sys.dim = 2;
  sys.potential = [](const Vec& q, double) { return -1 / q.norm(); };
  sys.gradient = [](const Vec& q, double) -> Vec { return q / std::pow(q.norm(), 3); };
  sys.damping = [alpha, Omega](double t) { return alpha * std::sin(Omega * t); };
  System::SecondDerivatives d2;
  d2.dV_dt = [](const Vec&, double) { return 0.0; };
  d2.hessian = [](const Vec& q, double) -> Mat {
    const double r = q.norm();
    return Mat::Identity(2, 2) / std::pow(r, 3) - 3 * q * q.transpose() / std::pow(r, 5);
  };
  d2.dgrad_dt = [](const Vec&, double) -> Vec { return Vec::Zero(2); };
  d2.d2V_dt2 = [](const Vec&, double) { return 0.0; };
  d2.df_dt = [alpha, Omega](double t) { return alpha * Omega * std::cos(Omega * t); };
  d2.d2f_dt2 = [alpha, Omega](double t) { return -alpha * Omega * Omega * std::sin(Omega * t); };
  sys.second = d2;
  return sys;
}

// c + b.z + z.A z / 2 on z = (q, p, s), with exact gradient.
inline contact::GeneralContactHamiltonian<double> quadratic(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1, 1);
  const Eigen::Index m = 2 * n + 1;
  Mat A(m, m);
  Vec b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    b(i) = u(rng);
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = u(rng);
  }
  A = (A + A.transpose()).eval() / 2;
  const double c = u(rng);
  contact::GeneralContactHamiltonian<double> h;
  h.dim = n;
  h.value = [=](const ContactStated& x) {
    const Vec z = x.phase();
    return c + b.dot(z) + z.dot(A * z) / 2;
  };
  auto grad = [=](const ContactStated& x) -> Vec { return b + A * x.phase(); };
  h.dH_dq = [=](const ContactStated& x) -> Vec { return grad(x).head(n); };
  h.dH_dp = [=](const ContactStated& x) -> Vec { return grad(x).segment(n, n); };
  h.dH_ds = [=](const ContactStated& x) { return grad(x)(2 * n); };
  return h;
}

// H with partials taken by central differences of the value only.
inline contact::GeneralContactHamiltonian<double> from_value(Eigen::Index n, std::function<double(const ContactStated&)> value) {
  contact::GeneralContactHamiltonian<double> h;
  h.dim = n;
  h.value = value;
  h.dH_dq = [value](const ContactStated& x) -> Vec {
    return contact::central_gradient<double>([&](const Vec& q) { auto y = x; y.q = q; return value(y); }, x.q);
  };
  h.dH_dp = [value](const ContactStated& x) -> Vec {
    return contact::central_gradient<double>([&](const Vec& p) { auto y = x; y.p = p; return value(y); }, x.p);
  };
  h.dH_ds = [value](const ContactStated& x) {
    return contact::central_derivative<double>([&](double s) { auto y = x; y.s = s; return value(y); }, x.s);
  };
  return h;
}

// Underdamped closed form through (q0, p0) at t = 0.
struct OscillatorSolution {
  double alpha, q0, p0;
  double omega() const { return std::sqrt(1 - alpha * alpha / 4); }
  double q(double t) const {
    const double w = omega(), B = (p0 + alpha / 2 * q0) / w;
    return std::exp(-alpha * t / 2) * (q0 * std::cos(w * t) + B * std::sin(w * t));
  }
  double p(double t) const {
    const double w = omega(), B = (p0 + alpha / 2 * q0) / w;
    const double c = std::cos(w * t), s = std::sin(w * t);
    return std::exp(-alpha * t / 2) * (-alpha / 2 * (q0 * c + B * s) + w * (-q0 * s + B * c));
  }
};

// Hand-rolled RK4 on a flat field z' = F(t, z).
template <typename Field>
Vec rk4_flow(Field&& F, Vec z, double t, double T, int substeps) {
  const double h = T / substeps;
  for (int i = 0; i < substeps; ++i) {
    const Vec k1 = F(t, z);
    const Vec k2 = F(t + h / 2, Vec(z + h / 2 * k1));
    const Vec k3 = F(t + h / 2, Vec(z + h / 2 * k2));
    const Vec k4 = F(t + h, Vec(z + h * k3));
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return z;
}

// Contact equations of the canonical class as a flat field on (q, p, s).
inline auto canonical_field(const System& sys) {
  return [sys](double t, const Vec& z) {
    const Eigen::Index n = (z.size() - 1) / 2;
    const Vec q = z.head(n), p = z.segment(n, n);
    const double f = sys.damping(t);
    Vec out(2 * n + 1);
    out << p, -sys.gradient(q, t) - f * p, p.squaredNorm() / 2 - sys.potential(q, t) - f * z(2 * n);
    return out;
  };
}

// Slope of log(err) against log(tau) by least squares.
inline double loglog_slope(const std::vector<double>& taus, const std::vector<double>& errs) {
  const double n = static_cast<double>(taus.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double x = std::log(taus[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing
