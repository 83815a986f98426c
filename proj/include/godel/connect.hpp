#pragma once

// Geodesic boundary-value problem through the reduced action: minimise the
// discretised J over interior base nodes, lift the critical path to (y, t)
// with the quadrature maps, and check the result against the full geodesic
// equations.
//
// Normalisation: J keeps the 1/2 on the kinetic term and the full action f
// has none, so the lifted identity reads f(x, y(x), t(x)) = 2 J(x).

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "godel/error.hpp"
#include "godel/linalg.hpp"
#include "godel/pathspace.hpp"
#include "godel/spacetime.hpp"

namespace godel {

struct Endpoints {
  Point x_p, x_q;
  double y_p = 0.0, t_p = 0.0;
  double y_q = 0.0, t_q = 0.0;

  BoundaryData boundary() const { return {y_q - y_p, t_q - t_p}; }
};

struct SolverConfig {
  int segments = 64;
  int max_iters = 2000;
  /// Stop when the sup-norm of the gradient divided by the grid step (the
  /// discrete Euler-Lagrange defect) is below this.
  double grad_tol = 1e-8;
  int restarts = 4;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double ell_floor = kDefaultEllFloor;
  /// Amplitude of the sinusoidal perturbations of restarts 1.., relative to
  /// max(1, |x_q - x_p|).
  double perturbation = 0.1;
  std::uint64_t seed = 0;
  /// Conjugate directions are reset to steepest descent this often.
  int cg_reset_period = 50;

  void validate() const {
    if (segments < 2) throw InvalidArgument("segments must be >= 2");
    if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
    if (!(grad_tol > 0.0)) throw InvalidArgument("grad_tol must be positive");
    if (restarts < 1) throw InvalidArgument("restarts must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("shrink must lie in (0, 1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5))
      throw InvalidArgument("sufficient_decrease must lie in (0, 0.5)");
    if (!(ell_floor > 0.0)) throw InvalidArgument("ell_floor must be positive");
    if (!(perturbation >= 0.0)) throw InvalidArgument("perturbation must be nonnegative");
    if (cg_reset_period < 1) throw InvalidArgument("cg_reset_period must be positive");
  }
};

struct RestartRecord {
  int index = 0;
  bool converged = false;
  bool degenerate = false;
  int iterations = 0;
  double J = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct GeodesicSolution {
  DiscretePath path;
  std::vector<double> y_curve, t_curve;
  double action_J = std::numeric_limits<double>::quiet_NaN();
  double action_f = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  /// Estimated discretisation error of f and 2J (see check_action_identity).
  double quadrature_tolerance = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  /// Every restart hit |L| <= ell_floor (or left the Lorentzian region).
  bool degenerate = false;
  int iterations = 0;
  int restart_used = -1;
  std::vector<RestartRecord> restarts;
  /// J after every accepted line-search step of the selected restart.
  std::vector<double> J_history;
  std::string message;
};

struct FiberCurves {
  std::vector<double> y, t;
};

/// y(s), t(s) on the grid from the quadrature maps
///   y = y_p + k_b int_0^s B/H + k_a int_0^s C/H
///   t = t_p - k_b int_0^s A/H + k_a int_0^s B/H
/// with k_b = (dy b - dt c)/L, k_a = (dy a + dt b)/L, using the cumulative
/// trapezoid rule (the same rule as a, b, c, so s = 1 lands on y_q, t_q).
inline FiberCurves reconstruct_fibers(const SpacetimeSpec& spec, const DiscretePath& path,
                                      const Endpoints& ep, double ell_floor = kDefaultEllFloor) {
  const detail::PathEvaluation ev = detail::evaluate_path(spec, path, false);
  const PathFunctionals& f = ev.f;
  detail::require_nondegenerate(f.ell, ell_floor);
  const BoundaryData bd = ep.boundary();
  const double kb = (bd.delta_y * f.b - bd.delta_t * f.c) / f.ell;
  const double ka = (bd.delta_y * f.a + bd.delta_t * f.b) / f.ell;
  const int n = path.segments();
  const double h = path.step();
  FiberCurves out;
  out.y.resize(static_cast<std::size_t>(n + 1));
  out.t.resize(static_cast<std::size_t>(n + 1));
  double ia = 0.0, ib = 0.0, ic = 0.0;
  out.y[0] = ep.y_p;
  out.t[0] = ep.t_p;
  for (int i = 1; i <= n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    ia += 0.5 * h * (ev.p[u - 1] + ev.p[u]);
    ib += 0.5 * h * (ev.q[u - 1] + ev.q[u]);
    ic += 0.5 * h * (ev.r[u - 1] + ev.r[u]);
    out.y[u] = ep.y_p + kb * ib + ka * ic;
    out.t[u] = ep.t_p - kb * ia + ka * ib;
  }
  return out;
}

/// Midpoint rule for f = int <x',x'>_R + A y'^2 + 2 B y' t' - C t'^2 on a
/// piecewise-linear curve, coefficients taken at segment midpoints.
inline double full_action(const SpacetimeSpec& spec, const DiscretePath& path,
                          std::span<const double> y, std::span<const double> t) {
  const int n = path.segments();
  const auto ud = static_cast<std::size_t>(path.dim());
  if (y.size() != static_cast<std::size_t>(n + 1) || t.size() != y.size())
    throw InvalidArgument("fiber curves do not match the path grid");
  const double h = path.step();
  double f = 0.0;
  std::vector<double> delta(ud), mid(ud);
  for (int i = 0; i < n; ++i) {
    const auto x0 = path.node(i), x1 = path.node(i + 1);
    for (std::size_t k = 0; k < ud; ++k) {
      delta[k] = x1[k] - x0[k];
      mid[k] = 0.5 * (x0[k] + x1[k]);
    }
    const auto u = static_cast<std::size_t>(i);
    const double dy = y[u + 1] - y[u];
    const double dt = t[u + 1] - t[u];
    const CoefficientValues c = sample_values(spec, mid);
    const double base = spec.euclidean_base() ? dot(delta, delta)
                                              : sample_base_metric(spec, mid).inner(delta, delta);
    f += (base + c.A * dy * dy + 2.0 * c.B * dy * dt - c.C * dt * dt) / h;
  }
  return f;
}

/// Sup over interior nodes of the defect of the full geodesic equations,
/// with velocities and accelerations from central differences, each node
/// scaled by 1 + |z'|^2.
inline double geodesic_residual(const SpacetimeSpec& spec, const DiscretePath& path,
                                std::span<const double> y, std::span<const double> t) {
  const int n = path.segments();
  const int d = path.dim();
  const auto ud = static_cast<std::size_t>(d);
  if (y.size() != static_cast<std::size_t>(n + 1) || t.size() != y.size())
    throw InvalidArgument("fiber curves do not match the path grid");
  const double h = path.step();
  double worst = 0.0;
  std::vector<double> xd(ud), xdd(ud), defect(ud);
  for (int i = 1; i < n; ++i) {
    const auto xm = path.node(i - 1), x = path.node(i), xp = path.node(i + 1);
    for (std::size_t k = 0; k < ud; ++k) {
      xd[k] = (xp[k] - xm[k]) / (2.0 * h);
      xdd[k] = (xp[k] - 2.0 * x[k] + xm[k]) / (h * h);
    }
    const auto u = static_cast<std::size_t>(i);
    const double yd = (y[u + 1] - y[u - 1]) / (2.0 * h);
    const double td = (t[u + 1] - t[u - 1]) / (2.0 * h);
    const double ydd = (y[u + 1] - 2.0 * y[u] + y[u - 1]) / (h * h);
    const double tdd = (t[u + 1] - 2.0 * t[u] + t[u - 1]) / (h * h);
    const CoefficientSample s = sample_coefficients(spec, x);

    std::vector<double> force(ud);
    for (std::size_t k = 0; k < ud; ++k)
      force[k] = 0.5 * (s.gradA[k] * yd * yd + 2.0 * s.gradB[k] * yd * td - s.gradC[k] * td * td);
    if (spec.euclidean_base()) {
      for (std::size_t k = 0; k < ud; ++k) defect[k] = xdd[k] - force[k];
    } else {
      const BaseMetricSample g = sample_base_metric(spec, x);
      const std::vector<double> ginv = invert_spd(g.g, d);
      std::vector<double> lowered(ud);  // Gamma_{k,ij} x'^i x'^j - force_k
      for (std::size_t k = 0; k < ud; ++k) {
        double gam = 0.0;
        for (std::size_t i2 = 0; i2 < ud; ++i2)
          for (std::size_t j = 0; j < ud; ++j)
            gam += (g.dg[i2 * ud * ud + j * ud + k] - 0.5 * g.dg[k * ud * ud + i2 * ud + j]) *
                   xd[i2] * xd[j];
        lowered[k] = gam - force[k];
      }
      for (std::size_t k = 0; k < ud; ++k) {
        double raised = 0.0;
        for (std::size_t j = 0; j < ud; ++j) raised += ginv[k * ud + j] * lowered[j];
        defect[k] = xdd[k] + raised;
      }
    }
    // d/ds (A y' + B t') = 0 and d/ds (B y' - C t') = 0, solved for (y'', t'')
    const double a_dot = dot(s.gradA, xd), b_dot = dot(s.gradB, xd), c_dot = dot(s.gradC, xd);
    const double rhs1 = -a_dot * yd - b_dot * td;
    const double rhs2 = -b_dot * yd + c_dot * td;
    const double ay = (s.C * rhs1 + s.B * rhs2) / s.H;
    const double at = (s.B * rhs1 - s.A * rhs2) / s.H;

    const double scale = 1.0 + dot(xd, xd) + yd * yd + td * td;
    double m = std::max(std::abs(ydd - ay), std::abs(tdd - at));
    for (double v : defect) m = std::max(m, std::abs(v));
    worst = std::max(worst, m / scale);
  }
  return worst;
}

struct ActionIdentity {
  double J = 0.0;
  double f = 0.0;
  double defect = 0.0;     // |2J - f|
  double tolerance = 0.0;  // quadrature tolerance
  bool holds = false;      // defect <= 10 * tolerance
};

/// Checks f(x, y(x), t(x)) = 2 J(x) on one path. The quadrature tolerance is
/// |f_N - f_N'| + |2J_N - 2J_N'| at the companion resolution N' = N/2 (or 2N
/// when N is odd), plus a rounding floor; both sides converge at second
/// order, so their difference is bounded by a third of this sum
/// asymptotically.
inline ActionIdentity check_action_identity(const SpacetimeSpec& spec, const DiscretePath& path,
                                            const Endpoints& ep,
                                            double ell_floor = kDefaultEllFloor) {
  auto evaluate_pair = [&](const DiscretePath& p) {
    const double J = reduced_action(spec, p, ep.boundary(), ell_floor);
    const FiberCurves fc = reconstruct_fibers(spec, p, ep, ell_floor);
    return std::pair{J, full_action(spec, p, fc.y, fc.t)};
  };
  const auto [J, f] = evaluate_pair(path);
  const DiscretePath other =
      (path.segments() % 2 == 0 && path.segments() >= 4) ? path.coarsened() : path.refined();
  const auto [J2, f2] = evaluate_pair(other);
  ActionIdentity out;
  out.J = J;
  out.f = f;
  out.defect = std::abs(2.0 * J - f);
  out.tolerance = std::abs(f - f2) + std::abs(2.0 * J - 2.0 * J2) + 1e-12 * (1.0 + std::abs(f));
  out.holds = out.defect <= 10.0 * out.tolerance;
  return out;
}

/// Richardson extrapolation of a quantity with error O(h^order).
inline double richardson(double coarse, double fine, int order = 2) {
  const double r = std::pow(2.0, order);
  return fine + (fine - coarse) / (r - 1.0);
}

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Straight segment for restart 0, otherwise the segment plus two
/// low-frequency sinusoidal bumps in seeded random directions.
inline DiscretePath initial_path(const Endpoints& ep, const SolverConfig& cfg, int restart) {
  DiscretePath path = DiscretePath::straight(ep.x_p, ep.x_q, cfg.segments);
  if (restart == 0 || cfg.perturbation == 0.0) return path;
  const int d = path.dim();
  const auto ud = static_cast<std::size_t>(d);
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(restart));
  const double scale = cfg.perturbation * std::max(1.0, std::sqrt(squared_distance(ep.x_p, ep.x_q)));
  std::vector<double> interior(path.interior().begin(), path.interior().end());
  for (int mode = 1; mode <= 2; ++mode) {
    std::vector<double> dir(ud);
    double norm = 0.0;
    while (norm < 1e-3) {
      for (auto& v : dir) v = 2.0 * unit_uniform(rng) - 1.0;
      norm = std::sqrt(dot(dir, dir));
    }
    const double amp = scale * (2.0 * unit_uniform(rng) - 1.0) / mode;
    for (int i = 1; i < cfg.segments; ++i) {
      const double s = static_cast<double>(i) / cfg.segments;
      const double bump = amp * std::sin(mode * M_PI * s);
      for (std::size_t k = 0; k < ud; ++k)
        interior[static_cast<std::size_t>(i - 1) * ud + k] += bump * dir[k] / norm;
    }
  }
  path.set_interior(interior);
  return path;
}

/// H^1 (Sobolev) preconditioner: z = h * Laplacian^{-1} g per coordinate.
inline std::vector<double> precondition(std::span<const double> g, int d, double h) {
  const auto ud = static_cast<std::size_t>(d);
  const std::size_t m = g.size() / ud;
  std::vector<double> z(g.size());
  std::vector<double> col(m);
  for (std::size_t k = 0; k < ud; ++k) {
    for (std::size_t i = 0; i < m; ++i) col[i] = g[i * ud + k];
    solve_laplacian_inplace(col);
    for (std::size_t i = 0; i < m; ++i) z[i * ud + k] = h * col[i];
  }
  return z;
}

struct DescentOutcome {
  DiscretePath path;
  RestartRecord record;
  std::vector<double> history;
};

/// Polak-Ribiere+ nonlinear conjugate gradient with backtracking. A trial
/// step is accepted under the Armijo condition, or under the approximate
/// Wolfe conditions (Hager-Zhang) once the decrease is below the rounding
/// level of J.
inline DescentOutcome descend(const SpacetimeSpec& spec, const BoundaryData& bd, DiscretePath path,
                              const SolverConfig& cfg, int restart) {
  DescentOutcome out;
  out.record.index = restart;
  const int d = path.dim();
  const double h = path.step();

  ActionAndGradient cur;
  try {
    cur = action_and_gradient(spec, path, bd, cfg.ell_floor);
  } catch (const DegenerateL& e) {
    out.record.degenerate = true;
    out.record.note = e.what();
    out.path = std::move(path);
    return out;
  } catch (const Error& e) {
    out.record.degenerate = true;
    out.record.note = e.what();
    out.path = std::move(path);
    return out;
  }
  out.history.push_back(cur.J);
  std::vector<double> z = precondition(cur.gradient, d, h);
  std::vector<double> dir(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) dir[i] = -z[i];
  double gnorm = sup_norm(cur.gradient) / h;

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (gnorm <= cfg.grad_tol) {
      out.record.converged = true;
      break;
    }
    double slope = dot(cur.gradient, dir);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < z.size(); ++i) dir[i] = -z[i];
      slope = dot(cur.gradient, dir);
    }
    const double noise = 1e-13 * (1.0 + std::abs(cur.J));
    double alpha = 1.0;
    bool accepted = false;
    ActionAndGradient next;
    DiscretePath trial = path;
    std::vector<double> interior(path.interior().size());
    for (int ls = 0; ls < 80 && !accepted; ++ls, alpha *= cfg.shrink) {
      const auto base = path.interior();
      for (std::size_t i = 0; i < interior.size(); ++i) interior[i] = base[i] + alpha * dir[i];
      trial.set_interior(interior);
      try {
        next = action_and_gradient(spec, trial, bd, cfg.ell_floor);
      } catch (const Error&) {
        continue;
      }
      const double dphi = dot(next.gradient, dir);
      const bool armijo = next.J <= cur.J + cfg.sufficient_decrease * alpha * slope;
      const bool approx_wolfe =
          next.J <= cur.J + noise && dphi >= 0.9 * slope && dphi <= -0.8 * slope;
      accepted = armijo || approx_wolfe;
    }
    if (!accepted) {
      out.record.note = "line search stalled";
      break;
    }
    path = trial;
    std::vector<double> z_new = precondition(next.gradient, d, h);
    double beta = 0.0;
    if ((it + 1) % cfg.cg_reset_period != 0) {
      double num = 0.0;
      for (std::size_t i = 0; i < z_new.size(); ++i) num += next.gradient[i] * (z_new[i] - z[i]);
      const double den = dot(cur.gradient, z);
      beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
    }
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = -z_new[i] + beta * dir[i];
    z = std::move(z_new);
    cur = std::move(next);
    gnorm = sup_norm(cur.gradient) / h;
    out.history.push_back(cur.J);
  }
  if (!out.record.converged && gnorm <= cfg.grad_tol) out.record.converged = true;
  if (!out.record.converged && out.record.note.empty()) out.record.note = "iteration limit reached";
  out.record.iterations = it;
  out.record.J = cur.J;
  out.record.grad_norm = gnorm;
  out.path = std::move(path);
  return out;
}

}  // namespace detail

/// Minimises the discretised reduced action from several initial paths,
/// keeps the best critical path, lifts it to (y, t) and evaluates the
/// geodesic residual. Nonconvergence is reported in the result, not thrown.
inline GeodesicSolution minimize_action(const SpacetimeSpec& spec, const Endpoints& ep,
                                        const SolverConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(ep.x_p.size()) != spec.dim || static_cast<int>(ep.x_q.size()) != spec.dim)
    throw InvalidArgument("endpoint dimension does not match the spacetime");
  const BoundaryData bd = ep.boundary();

  GeodesicSolution sol;
  int best = -1;
  std::vector<detail::DescentOutcome> runs;
  for (int r = 0; r < cfg.restarts; ++r) {
    runs.push_back(detail::descend(spec, bd, detail::initial_path(ep, cfg, r), cfg, r));
    sol.restarts.push_back(runs.back().record);
  }
  auto better = [&](int cand) {
    const RestartRecord& c = runs[static_cast<std::size_t>(cand)].record;
    if (c.degenerate) return false;
    if (best < 0) return true;
    const RestartRecord& b = runs[static_cast<std::size_t>(best)].record;
    if (c.converged != b.converged) return c.converged;
    return c.J < b.J;
  };
  for (int r = 0; r < cfg.restarts; ++r)
    if (better(r)) best = r;

  if (best < 0) {
    sol.degenerate = true;
    sol.path = DiscretePath::straight(ep.x_p, ep.x_q, cfg.segments);
    sol.message = "all restarts degenerate: " + sol.restarts.front().note;
    return sol;
  }
  detail::DescentOutcome& run = runs[static_cast<std::size_t>(best)];
  sol.path = std::move(run.path);
  sol.restart_used = best;
  sol.converged = run.record.converged;
  sol.iterations = run.record.iterations;
  sol.action_J = run.record.J;
  sol.grad_norm = run.record.grad_norm;
  sol.J_history = std::move(run.history);

  const FiberCurves fc = reconstruct_fibers(spec, sol.path, ep, cfg.ell_floor);
  sol.y_curve = fc.y;
  sol.t_curve = fc.t;
  sol.action_f = full_action(spec, sol.path, sol.y_curve, sol.t_curve);
  sol.residual = geodesic_residual(spec, sol.path, sol.y_curve, sol.t_curve);
  try {
    sol.quadrature_tolerance = check_action_identity(spec, sol.path, ep, cfg.ell_floor).tolerance;
  } catch (const Error&) {
    // companion resolution degenerate; leave the estimate undefined
  }
  sol.message = sol.converged ? "converged" : "not converged: " + run.record.note;
  return sol;
}

}  // namespace godel
