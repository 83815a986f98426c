#pragma once

// Initial-value problem for geodesics in the reduced form: the fiber
// momenta c1 = A y' + B t' and c2 = B y' - C t' are constants of motion, so
// (y', t') follow algebraically from x and only the base equation is
// integrated (plus y, t and the base arc length as passengers).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "godel/error.hpp"
#include "godel/linalg.hpp"
#include "godel/pathspace.hpp"
#include "godel/spacetime.hpp"

namespace godel {

struct InitialData {
  Point x, xdot;
  double y = 0.0, t = 0.0;
  double ydot = 0.0, tdot = 0.0;
};

struct ConservedQuantities {
  double c1 = 0.0, c2 = 0.0;
  double Ez = 0.0;  // <x', x'>_R + A y'^2 + 2 B y' t' - C t'^2
};

struct FiberVelocity {
  double ydot = 0.0, tdot = 0.0;
};

inline double base_norm2(const SpacetimeSpec& spec, std::span<const double> x,
                         std::span<const double> v) {
  return spec.euclidean_base() ? dot(v, v) : sample_base_metric(spec, x).inner(v, v);
}

inline ConservedQuantities conserved_from_velocity(const SpacetimeSpec& spec,
                                                   std::span<const double> x,
                                                   std::span<const double> xdot, double ydot,
                                                   double tdot) {
  const CoefficientValues s = sample_values(spec, x);
  ConservedQuantities q;
  q.c1 = s.A * ydot + s.B * tdot;
  q.c2 = s.B * ydot - s.C * tdot;
  q.Ez = base_norm2(spec, x, xdot) + s.A * ydot * ydot + 2.0 * s.B * ydot * tdot -
         s.C * tdot * tdot;
  return q;
}

/// (y', t') = S^{-1} (c1, c2).
inline FiberVelocity fiber_velocities(double A, double B, double C, double c1, double c2) {
  const double H = B * B + A * C;
  return {(c1 * C + c2 * B) / H, (c1 * B - c2 * A) / H};
}

/// |x'|_R^2 = Ez + (c2^2 A - c1^2 C - 2 c1 c2 B) / H along a geodesic.
inline double base_velocity_identity(const SpacetimeSpec& spec, std::span<const double> x,
                                     const ConservedQuantities& q) {
  const CoefficientValues s = sample_values(spec, x);
  return q.Ez + (q.c2 * q.c2 * s.A - q.c1 * q.c1 * s.C - 2.0 * q.c1 * q.c2 * s.B) / s.H;
}

/// Upper bound Ez + 2 |c|^2 / mu for |x'|_R^2.
inline double base_velocity_bound(const SpacetimeSpec& spec, std::span<const double> x,
                                  const ConservedQuantities& q) {
  const CoefficientValues s = sample_values(spec, x);
  return q.Ez + 2.0 * (q.c1 * q.c1 + q.c2 * q.c2) / mu_closed_form(s.A, s.B, s.C);
}

struct StepControl {
  double h = 1e-3;          // fixed step, or the first trial step when adaptive
  bool adaptive = true;
  double tol = 1e-10;       // local error per step, relative to 1 + |state|
  double h_min = 1e-12;     // below this the solution is declared blown up
  double h_max = 0.1;
  double blowup = 1e12;     // |x'| above this is a blow-up
  long max_steps = 50'000'000;
  int record_stride = 1;    // keep every n-th accepted step

  void validate() const {
    if (!(h > 0.0)) throw InvalidArgument("step must be positive");
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (!(h_min > 0.0) || !(h_max >= h_min)) throw InvalidArgument("invalid step bounds");
    if (!(blowup > 0.0)) throw InvalidArgument("blow-up threshold must be positive");
    if (max_steps < 1) throw InvalidArgument("max_steps must be positive");
    if (record_stride < 1) throw InvalidArgument("record_stride must be positive");
  }
};

enum class Termination { Completed, BlowUp, LorentzViolation, DomainError, StepLimit };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::BlowUp: return "blow_up";
    case Termination::LorentzViolation: return "lorentz_violation";
    case Termination::DomainError: return "domain_error";
    case Termination::StepLimit: return "step_limit";
  }
  return "unknown";
}

struct TrajectorySample {
  double s = 0.0;
  Point x, xdot;
  double y = 0.0, t = 0.0;
  double ydot = 0.0, tdot = 0.0;
  double length = 0.0;  // base arc length from s = 0
  double c1_drift = 0.0, c2_drift = 0.0, Ez_drift = 0.0;
};

struct Trajectory {
  ConservedQuantities initial;
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::Completed;
  double s_end = 0.0;
  long steps = 0;
  std::string message;

  const TrajectorySample& back() const { return samples.back(); }
};

namespace detail {

// State layout: x (d), x' (d), y, t, arc length.
struct GeodesicRhs {
  const SpacetimeSpec& spec;
  double c1, c2;
  int d;

  void operator()(std::span<const double> z, std::span<double> out) const {
    const auto ud = static_cast<std::size_t>(d);
    const auto x = z.subspan(0, ud);
    const auto v = z.subspan(ud, ud);
    const CoefficientSample s = sample_coefficients(spec, x);
    const FiberVelocity fv = fiber_velocities(s.A, s.B, s.C, c1, c2);
    std::vector<double> force(ud);
    for (std::size_t k = 0; k < ud; ++k)
      force[k] = 0.5 * (s.gradA[k] * fv.ydot * fv.ydot + 2.0 * s.gradB[k] * fv.ydot * fv.tdot -
                        s.gradC[k] * fv.tdot * fv.tdot);
    double speed2;
    if (spec.euclidean_base()) {
      for (std::size_t k = 0; k < ud; ++k) out[ud + k] = force[k];
      speed2 = dot(v, v);
    } else {
      const BaseMetricSample g = sample_base_metric(spec, x);
      const std::vector<double> ginv = invert_spd(g.g, d);
      std::vector<double> lowered(ud);
      for (std::size_t k = 0; k < ud; ++k) {
        double gam = 0.0;
        for (std::size_t i = 0; i < ud; ++i)
          for (std::size_t j = 0; j < ud; ++j)
            gam += (g.dg[i * ud * ud + j * ud + k] - 0.5 * g.dg[k * ud * ud + i * ud + j]) * v[i] *
                   v[j];
        lowered[k] = force[k] - gam;
      }
      for (std::size_t k = 0; k < ud; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ud; ++j) acc += ginv[k * ud + j] * lowered[j];
        out[ud + k] = acc;
      }
      speed2 = g.inner(v, v);
    }
    for (std::size_t k = 0; k < ud; ++k) out[k] = v[k];
    out[2 * ud] = fv.ydot;
    out[2 * ud + 1] = fv.tdot;
    out[2 * ud + 2] = std::sqrt(std::max(0.0, speed2));
  }
};

inline std::vector<double> rk4_step(const GeodesicRhs& f, std::span<const double> z, double h) {
  const std::size_t n = z.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), out(n);
  f(z, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
  f(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
  f(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
  f(tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace detail

/// Integrates the geodesic with the given initial data on [0, s_max]. Stops
/// early (recording why) on blow-up, on leaving the region H > 0, or on a
/// coefficient domain error.
inline Trajectory integrate_geodesic(const SpacetimeSpec& spec, const InitialData& init,
                                     double s_max, const StepControl& ctl = {}) {
  ctl.validate();
  const int d = spec.dim;
  const auto ud = static_cast<std::size_t>(d);
  if (init.x.size() != ud || init.xdot.size() != ud)
    throw InvalidArgument("initial data dimension does not match the spacetime");
  if (!(s_max >= 0.0) || !std::isfinite(s_max)) throw InvalidArgument("s_max must be finite and >= 0");
  sample_coefficients(spec, init.x);  // LorentzViolation at the start is the caller's error

  Trajectory traj;
  traj.initial = conserved_from_velocity(spec, init.x, init.xdot, init.ydot, init.tdot);
  const detail::GeodesicRhs rhs{spec, traj.initial.c1, traj.initial.c2, d};

  std::vector<double> z(2 * ud + 3);
  std::copy(init.x.begin(), init.x.end(), z.begin());
  std::copy(init.xdot.begin(), init.xdot.end(), z.begin() + d);
  z[2 * ud] = init.y;
  z[2 * ud + 1] = init.t;
  z[2 * ud + 2] = 0.0;

  auto record = [&](double s, std::span<const double> st) {
    TrajectorySample smp;
    smp.s = s;
    smp.x.assign(st.begin(), st.begin() + d);
    smp.xdot.assign(st.begin() + d, st.begin() + 2 * d);
    smp.y = st[2 * ud];
    smp.t = st[2 * ud + 1];
    smp.length = st[2 * ud + 2];
    const CoefficientValues c = sample_values(spec, smp.x);
    const FiberVelocity fv = fiber_velocities(c.A, c.B, c.C, traj.initial.c1, traj.initial.c2);
    smp.ydot = fv.ydot;
    smp.tdot = fv.tdot;
    const ConservedQuantities q = conserved_from_velocity(spec, smp.x, smp.xdot, fv.ydot, fv.tdot);
    smp.c1_drift = q.c1 - traj.initial.c1;
    smp.c2_drift = q.c2 - traj.initial.c2;
    smp.Ez_drift = q.Ez - traj.initial.Ez;
    traj.samples.push_back(std::move(smp));
  };
  record(0.0, z);

  double s = 0.0;
  double h = std::min(ctl.h, ctl.adaptive ? ctl.h_max : ctl.h);
  long accepted = 0;
  auto finish = [&](Termination why, std::string msg) {
    traj.termination = why;
    traj.message = std::move(msg);
  };
  auto speed_blown = [&](std::span<const double> st) {
    return !(std::sqrt(dot(st.subspan(ud, ud), st.subspan(ud, ud))) <= ctl.blowup);
  };

  while (s < s_max) {
    if (accepted >= ctl.max_steps) {
      finish(Termination::StepLimit, "step limit reached");
      break;
    }
    const double remaining = s_max - s;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;
    std::vector<double> next;
    try {
      if (!ctl.adaptive) {
        next = detail::rk4_step(rhs, z, step);
      } else {
        const std::vector<double> big = detail::rk4_step(rhs, z, step);
        const std::vector<double> half = detail::rk4_step(rhs, z, 0.5 * step);
        const std::vector<double> two = detail::rk4_step(rhs, half, 0.5 * step);
        double err = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
          err = std::max(err, std::abs(two[i] - big[i]) / (15.0 * (1.0 + std::abs(two[i]))));
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
        const double grow = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(ctl.tol / err, 0.2), 0.1, 4.0);
        if (err > ctl.tol) {
          h = step * grow;
          if (h < ctl.h_min) {
            finish(Termination::BlowUp, "step size underflow");
            break;
          }
          continue;
        }
        next.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) next[i] = two[i] + (two[i] - big[i]) / 15.0;
        h = std::min(ctl.h_max, std::max(step, h) * grow);
      }
      sample_coefficients(spec, std::span<const double>(next).subspan(0, ud));
    } catch (const LorentzViolation& e) {
      if (ctl.adaptive && step * 0.25 >= ctl.h_min) {
        h = step * 0.25;
        continue;
      }
      finish(Termination::LorentzViolation, e.what());
      break;
    } catch (const DomainError& e) {
      if (ctl.adaptive && step * 0.25 >= ctl.h_min) {
        h = step * 0.25;
        continue;
      }
      finish(Termination::DomainError, e.what());
      break;
    }
    if (speed_blown(next)) {
      finish(Termination::BlowUp, "base speed exceeded the blow-up threshold");
      break;
    }
    z = std::move(next);
    s = last ? s_max : s + step;
    ++accepted;
    if (accepted % ctl.record_stride == 0 || s >= s_max) record(s, z);
  }
  if (traj.samples.back().s != s) record(s, z);
  traj.s_end = s;
  traj.steps = accepted;
  if (traj.message.empty()) traj.message = "completed";
  return traj;
}

/// Quadratic growth witness for 1/mu: 1/mu(x) <= lambda d^2(x, x0) + k.
struct ProbeReport {
  double lambda_bar = 0.0;
  double k_bar = 0.0;
  double c_norm2 = 0.0;  // c1^2 + c2^2
  double Ez = 0.0;
  /// max over samples of log(lambda_bar L + k_bar) - log k_bar - lambda_bar s
  /// (or L - k_bar s when lambda_bar = 0); nonpositive when the bound holds.
  double max_excess = -std::numeric_limits<double>::infinity();
  /// max over samples of |x'|^2 - (Ez + 2|c|^2/mu).
  double max_speed_excess = -std::numeric_limits<double>::infinity();
  /// Samples where the witness itself fails along the trajectory.
  int witness_violations = 0;
  bool speed_bound_holds = false;
  bool bound_holds = false;
  Trajectory trajectory;
};

/// Integrates the geodesic and checks the a-priori arc-length bound that
/// makes it complete:
///   lambda_bar = sqrt(2 |c|^2 lambda)
///   k_bar = sqrt(max(0, |Ez| + 2 |c|^2 k)) + lambda_bar d(x(0), x0) + 1
///   log(lambda_bar L(s) + k_bar) - log k_bar <= lambda_bar s.
inline ProbeReport completeness_probe(const SpacetimeSpec& spec, const InitialData& init,
                                      const GrowthWitness& w, double s_max,
                                      const StepControl& ctl = {}) {
  if (!spec.euclidean_base())
    throw InvalidArgument("the completeness probe needs a Euclidean base metric");
  if (w.x0.size() != static_cast<std::size_t>(spec.dim))
    throw InvalidArgument("witness center dimension does not match the spacetime");
  if (!(w.lambda >= 0.0) || !std::isfinite(w.k)) throw InvalidArgument("invalid growth witness");

  ProbeReport rep;
  rep.trajectory = integrate_geodesic(spec, init, s_max, ctl);
  const ConservedQuantities& q = rep.trajectory.initial;
  rep.c_norm2 = q.c1 * q.c1 + q.c2 * q.c2;
  rep.Ez = q.Ez;
  rep.lambda_bar = std::sqrt(2.0 * rep.c_norm2 * w.lambda);
  rep.k_bar = std::sqrt(std::max(0.0, std::abs(q.Ez) + 2.0 * rep.c_norm2 * w.k)) +
              rep.lambda_bar * std::sqrt(squared_distance(init.x, w.x0)) + 1.0;

  double slack = 0.0;
  bool speed_ok = true;
  for (const TrajectorySample& smp : rep.trajectory.samples) {
    const double excess =
        rep.lambda_bar > 0.0
            ? std::log(rep.lambda_bar * smp.length + rep.k_bar) - std::log(rep.k_bar) -
                  rep.lambda_bar * smp.s
            : smp.length - rep.k_bar * smp.s;
    rep.max_excess = std::max(rep.max_excess, excess);
    slack = std::max(slack, 1e-9 * (1.0 + rep.lambda_bar * smp.s));

    const CoefficientValues c = sample_values(spec, smp.x);
    const double mu = mu_closed_form(c.A, c.B, c.C);
    const double speed2 = dot(smp.xdot, smp.xdot);
    const double bound = q.Ez + 2.0 * rep.c_norm2 / mu;
    rep.max_speed_excess = std::max(rep.max_speed_excess, speed2 - bound);
    // equality when B = 0, so the tolerance follows the size of the bound
    if (speed2 - bound > 1e-8 * (1.0 + std::abs(q.Ez) + rep.c_norm2 + std::abs(bound)))
      speed_ok = false;
    if (1.0 / mu > w.lambda * squared_distance(smp.x, w.x0) + w.k + 1e-12) ++rep.witness_violations;
  }
  rep.bound_holds = rep.max_excess <= slack;
  rep.speed_bound_holds = speed_ok;
  return rep;
}

}  // namespace godel
