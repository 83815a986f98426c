#pragma once

// Discretised base paths x: [0,1] -> R^d with fixed endpoints, and the
// functionals of the reduced variational principle on them:
//
//   a = int A/H,  b = int B/H,  c = int C/H,  L = b^2 + a c,
//   J = 1/2 int <x', x'>_R + (dy^2 a + 2 dy dt b - dt^2 c) / (2 L).
//
// Coefficient integrals use the composite trapezoid rule on the uniform grid
// s_i = i/N; the kinetic term uses the midpoint rule on segment differences.
// Gradients are exact for this discretisation.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "godel/error.hpp"
#include "godel/linalg.hpp"
#include "godel/spacetime.hpp"

namespace godel {

inline constexpr double kDefaultEllFloor = 1e-10;

class DiscretePath {
 public:
  DiscretePath() = default;

  DiscretePath(int dim, int segments, std::vector<double> nodes)
      : dim_(dim), segments_(segments), nodes_(std::move(nodes)) {
    if (dim < 1) throw InvalidArgument("path dimension must be positive");
    if (segments < 2) throw InvalidArgument("a path needs at least 2 segments");
    if (nodes_.size() != static_cast<std::size_t>((segments + 1) * dim))
      throw InvalidArgument("path node array has the wrong size");
  }

  static DiscretePath straight(std::span<const double> xp, std::span<const double> xq,
                               int segments) {
    if (xp.size() != xq.size()) throw InvalidArgument("endpoint dimensions differ");
    const int d = static_cast<int>(xp.size());
    std::vector<double> nodes(static_cast<std::size_t>((segments + 1) * d));
    for (int i = 0; i <= segments; ++i) {
      const double s = static_cast<double>(i) / segments;
      for (int k = 0; k < d; ++k)
        nodes[static_cast<std::size_t>(i * d + k)] = (1.0 - s) * xp[k] + s * xq[k];
    }
    // exact endpoints regardless of rounding in the blend
    for (int k = 0; k < d; ++k) {
      nodes[static_cast<std::size_t>(k)] = xp[k];
      nodes[static_cast<std::size_t>(segments * d + k)] = xq[k];
    }
    return DiscretePath(d, segments, std::move(nodes));
  }

  int dim() const noexcept { return dim_; }
  int segments() const noexcept { return segments_; }
  double step() const noexcept { return 1.0 / segments_; }
  std::span<const double> node(int i) const {
    return {nodes_.data() + static_cast<std::size_t>(i * dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& data() const noexcept { return nodes_; }
  std::span<const double> interior() const {
    return {nodes_.data() + dim_, static_cast<std::size_t>((segments_ - 1) * dim_)};
  }
  /// Replaces the interior nodes; endpoints are untouchable.
  void set_interior(std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>((segments_ - 1) * dim_))
      throw InvalidArgument("interior update has the wrong size");
    std::copy(values.begin(), values.end(), nodes_.begin() + dim_);
  }

  /// Same curve with every other node dropped (N must be even).
  DiscretePath coarsened() const {
    if (segments_ % 2 != 0 || segments_ < 4)
      throw InvalidArgument("coarsening needs an even segment count >= 4");
    const int n = segments_ / 2;
    std::vector<double> out(static_cast<std::size_t>((n + 1) * dim_));
    for (int i = 0; i <= n; ++i)
      for (int k = 0; k < dim_; ++k)
        out[static_cast<std::size_t>(i * dim_ + k)] = nodes_[static_cast<std::size_t>(2 * i * dim_ + k)];
    return DiscretePath(dim_, n, std::move(out));
  }

  /// Same polyline with segment midpoints inserted.
  DiscretePath refined() const {
    const int n = 2 * segments_;
    std::vector<double> out(static_cast<std::size_t>((n + 1) * dim_));
    for (int i = 0; i <= segments_; ++i)
      for (int k = 0; k < dim_; ++k) {
        out[static_cast<std::size_t>(2 * i * dim_ + k)] = nodes_[static_cast<std::size_t>(i * dim_ + k)];
        if (i < segments_)
          out[static_cast<std::size_t>((2 * i + 1) * dim_ + k)] =
              0.5 * (nodes_[static_cast<std::size_t>(i * dim_ + k)] +
                     nodes_[static_cast<std::size_t>((i + 1) * dim_ + k)]);
      }
    return DiscretePath(dim_, n, std::move(out));
  }

 private:
  int dim_ = 0;
  int segments_ = 0;
  std::vector<double> nodes_;
};

/// Fiber displacements: delta_y = y_q - y_p, delta_t = t_q - t_p.
struct BoundaryData {
  double delta_y = 0.0;
  double delta_t = 0.0;
};

struct PathFunctionals {
  double a = 0, b = 0, c = 0;
  double ell = 0;  // b^2 + a c
  double lam_plus = 0, lam_minus = 0;  // eigenvalues of [[a, b], [b, -c]]
  double delta_plus = 0, delta_minus = 0;  // filled by diagonalized_action
  double kinetic = 0;  // int <x', x'>_R ds
};

/// Quadratic growth witness: field(x) <= lambda d^2(x, x0) + k.
struct GrowthWitness {
  double lambda = 0.0;
  double k = 1.0;
  Point x0;
};

namespace detail {

struct PathEvaluation {
  PathFunctionals f;
  std::vector<double> p, q, r;     // A/H, B/H, C/H per node
  std::vector<double> dp, dq, dr;  // their gradients, (N+1) x d
  std::vector<double> dkin;        // gradient of the kinetic integral, (N+1) x d
};

inline PathEvaluation evaluate_path(const SpacetimeSpec& spec, const DiscretePath& path,
                                    bool with_gradient) {
  if (path.dim() != spec.dim) throw InvalidArgument("path dimension does not match spacetime");
  const int n = path.segments();
  const int d = path.dim();
  const double h = path.step();
  const auto nn = static_cast<std::size_t>(n + 1);
  const auto ud = static_cast<std::size_t>(d);
  PathEvaluation ev;
  ev.p.resize(nn);
  ev.q.resize(nn);
  ev.r.resize(nn);
  if (with_gradient) {
    ev.dp.assign(nn * ud, 0.0);
    ev.dq.assign(nn * ud, 0.0);
    ev.dr.assign(nn * ud, 0.0);
    ev.dkin.assign(nn * ud, 0.0);
  }
  double a = 0, b = 0, c = 0;
  for (int i = 0; i <= n; ++i) {
    const auto x = path.node(i);
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    const auto ui = static_cast<std::size_t>(i);
    if (with_gradient) {
      const CoefficientSample s = sample_coefficients(spec, x);
      const double p = s.A / s.H, q = s.B / s.H, r = s.C / s.H;
      ev.p[ui] = p;
      ev.q[ui] = q;
      ev.r[ui] = r;
      const auto gh = s.gradH();
      for (std::size_t k = 0; k < ud; ++k) {
        ev.dp[ui * ud + k] = (s.gradA[k] - p * gh[k]) / s.H;
        ev.dq[ui * ud + k] = (s.gradB[k] - q * gh[k]) / s.H;
        ev.dr[ui * ud + k] = (s.gradC[k] - r * gh[k]) / s.H;
      }
    } else {
      const CoefficientValues s = sample_values(spec, x);
      ev.p[ui] = s.A / s.H;
      ev.q[ui] = s.B / s.H;
      ev.r[ui] = s.C / s.H;
    }
    a += w * ev.p[ui];
    b += w * ev.q[ui];
    c += w * ev.r[ui];
  }

  double kin = 0.0;
  std::vector<double> delta(ud), mid(ud);
  for (int i = 0; i < n; ++i) {
    const auto x0 = path.node(i);
    const auto x1 = path.node(i + 1);
    for (std::size_t k = 0; k < ud; ++k) {
      delta[k] = x1[k] - x0[k];
      mid[k] = 0.5 * (x0[k] + x1[k]);
    }
    if (spec.euclidean_base()) {
      kin += dot(delta, delta) / h;
      if (with_gradient)
        for (std::size_t k = 0; k < ud; ++k) {
          ev.dkin[static_cast<std::size_t>(i) * ud + k] -= 2.0 * delta[k] / h;
          ev.dkin[static_cast<std::size_t>(i + 1) * ud + k] += 2.0 * delta[k] / h;
        }
    } else {
      const BaseMetricSample g = sample_base_metric(spec, mid);
      kin += g.inner(delta, delta) / h;
      if (with_gradient) {
        for (std::size_t k = 0; k < ud; ++k) {
          double g_delta = 0.0;
          for (std::size_t j = 0; j < ud; ++j) g_delta += g.g[k * ud + j] * delta[j];
          double quad_dk = 0.0;  // delta^T (d_k g) delta
          for (std::size_t i2 = 0; i2 < ud; ++i2)
            for (std::size_t j = 0; j < ud; ++j)
              quad_dk += delta[i2] * g.dg[k * ud * ud + i2 * ud + j] * delta[j];
          ev.dkin[static_cast<std::size_t>(i) * ud + k] += (-2.0 * g_delta + 0.5 * quad_dk) / h;
          ev.dkin[static_cast<std::size_t>(i + 1) * ud + k] += (2.0 * g_delta + 0.5 * quad_dk) / h;
        }
      }
    }
  }

  PathFunctionals& f = ev.f;
  f.a = a;
  f.b = b;
  f.c = c;
  f.ell = b * b + a * c;
  const SymEigen2 e = eigen_sym2(a, b, -c);
  f.lam_plus = e.plus;
  f.lam_minus = e.minus;
  f.kinetic = kin;
  return ev;
}

inline void require_nondegenerate(double ell, double floor) {
  if (!(std::abs(ell) > floor)) throw DegenerateL(ell, floor);
}

inline double fiber_numerator(const PathFunctionals& f, const BoundaryData& bd) {
  return bd.delta_y * bd.delta_y * f.a + 2.0 * bd.delta_y * bd.delta_t * f.b -
         bd.delta_t * bd.delta_t * f.c;
}

}  // namespace detail

/// a, b, c, L, the integrated-matrix eigenvalues, and the kinetic energy.
inline PathFunctionals path_integrals(const SpacetimeSpec& spec, const DiscretePath& path) {
  return detail::evaluate_path(spec, path, false).f;
}

/// Reduced action J. Throws DegenerateL when |L| <= ell_floor.
inline double reduced_action(const SpacetimeSpec& spec, const DiscretePath& path,
                             const BoundaryData& bd, double ell_floor = kDefaultEllFloor) {
  const PathFunctionals f = path_integrals(spec, path);
  detail::require_nondegenerate(f.ell, ell_floor);
  return 0.5 * f.kinetic + detail::fiber_numerator(f, bd) / (2.0 * f.ell);
}

/// Static reduced action 1/2 |x'|^2 - (dt^2 / 2) (int 1/beta)^{-1} with beta = C
/// for specs with B == 0. Only dt^2 enters, so the sign convention of dt is moot.
inline double static_reduced_action(const SpacetimeSpec& spec, const DiscretePath& path,
                                    const BoundaryData& bd) {
  const int n = path.segments();
  const double h = path.step();
  double inv_beta = 0.0;
  for (int i = 0; i <= n; ++i) {
    const auto x = path.node(i);
    const double b = evaluate(spec.B, x);
    const double beta = evaluate(spec.C, x);
    if (std::abs(b) > 1e-14 * (1.0 + std::abs(beta)))
      throw InvalidArgument("static functional needs B == 0 along the path");
    if (!(beta > 0.0)) throw DomainError("static functional needs beta = C > 0", {x.begin(), x.end()});
    inv_beta += ((i == 0 || i == n) ? 0.5 * h : h) / beta;
  }
  const double kinetic = detail::evaluate_path(spec, path, false).f.kinetic;
  return 0.5 * kinetic - 0.5 * bd.delta_t * bd.delta_t / inv_beta;
}

struct DiagonalizedAction {
  double J = 0;
  double delta_plus = 0, delta_minus = 0;
  double lam_plus = 0, lam_minus = 0;
};

/// J = 1/2 |x'|^2 - delta_+^2 / (2 lam_-) - delta_-^2 / (2 lam_+), with
/// (delta_+, delta_-) the components of (dy, dt) in the eigenframe of
/// [[a, b], [b, -c]] (delta_+ along the lam_+ eigenvector).
inline DiagonalizedAction diagonalized_action(const SpacetimeSpec& spec, const DiscretePath& path,
                                              const BoundaryData& bd,
                                              double ell_floor = kDefaultEllFloor) {
  const PathFunctionals f = path_integrals(spec, path);
  detail::require_nondegenerate(f.ell, ell_floor);
  const SymEigen2 e = eigen_sym2(f.a, f.b, -f.c);
  DiagonalizedAction out;
  out.lam_plus = e.plus;
  out.lam_minus = e.minus;
  out.delta_plus = e.v_plus[0] * bd.delta_y + e.v_plus[1] * bd.delta_t;
  out.delta_minus = e.v_minus[0] * bd.delta_y + e.v_minus[1] * bd.delta_t;
  out.J = 0.5 * f.kinetic - 0.5 * out.delta_plus * out.delta_plus / e.minus -
          0.5 * out.delta_minus * out.delta_minus / e.plus;
  return out;
}

struct ActionAndGradient {
  double J = 0.0;
  PathFunctionals functionals;
  std::vector<double> gradient;  // (N-1) x d, interior nodes only
};

/// J and its exact gradient with respect to the interior nodes.
inline ActionAndGradient action_and_gradient(const SpacetimeSpec& spec, const DiscretePath& path,
                                             const BoundaryData& bd,
                                             double ell_floor = kDefaultEllFloor) {
  const detail::PathEvaluation ev = detail::evaluate_path(spec, path, true);
  const PathFunctionals& f = ev.f;
  detail::require_nondegenerate(f.ell, ell_floor);
  const double num = detail::fiber_numerator(f, bd);
  const double ell = f.ell;
  const double dy = bd.delta_y, dt = bd.delta_t;
  // partials of num / (2 L) with respect to a, b, c
  const double fa = dy * dy / (2.0 * ell) - num * f.c / (2.0 * ell * ell);
  const double fb = dy * dt / ell - num * f.b / (ell * ell);
  const double fc = -dt * dt / (2.0 * ell) - num * f.a / (2.0 * ell * ell);

  ActionAndGradient out;
  out.J = 0.5 * f.kinetic + num / (2.0 * ell);
  out.functionals = f;
  const int n = path.segments();
  const auto ud = static_cast<std::size_t>(path.dim());
  const double h = path.step();
  out.gradient.resize(static_cast<std::size_t>(n - 1) * ud);
  for (int i = 1; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t k = 0; k < ud; ++k) {
      out.gradient[(ui - 1) * ud + k] =
          0.5 * ev.dkin[ui * ud + k] +
          h * (fa * ev.dp[ui * ud + k] + fb * ev.dq[ui * ud + k] + fc * ev.dr[ui * ud + k]);
    }
  }
  return out;
}

inline std::vector<double> action_gradient(const SpacetimeSpec& spec, const DiscretePath& path,
                                           const BoundaryData& bd,
                                           double ell_floor = kDefaultEllFloor) {
  return action_and_gradient(spec, path, bd, ell_floor).gradient;
}

struct PathMH {
  double m = 0.0;  // max{a, -c}
  double h = 0.0;  // int ds / (lambda d^2(x(s), x0) + k)
};

inline PathMH path_m_and_h(const SpacetimeSpec& spec, const DiscretePath& path,
                           const GrowthWitness& w) {
  const PathFunctionals f = path_integrals(spec, path);
  const int n = path.segments();
  const double step = path.step();
  double h = 0.0;
  for (int i = 0; i <= n; ++i) {
    const auto x = path.node(i);
    const double den = w.lambda * squared_distance(x, w.x0) + w.k;
    if (!(den > 0.0))
      throw DomainError("nonpositive denominator lambda d^2 + k", {x.begin(), x.end()});
    h += ((i == 0 || i == n) ? 0.5 * step : step) / den;
  }
  return {std::max(f.a, -f.c), h};
}

}  // namespace godel
