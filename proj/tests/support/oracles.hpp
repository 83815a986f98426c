#pragma once

// Independent reference computations used only by tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "godel/godel.hpp"

namespace oracle {

using godel::Point;

/// Seeded uniform numbers, identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Point point(int d, double lo, double hi) {
    Point x(static_cast<std::size_t>(d));
    for (auto& v : x) v = uniform(lo, hi);
    return x;
  }

 private:
  std::mt19937_64 g_;
};

/// Central differences of the reduced action over the interior nodes.
inline std::vector<double> fd_gradient(const godel::SpacetimeSpec& spec, const godel::DiscretePath& path,
                                       const godel::BoundaryData& bd, double rel_step = 1e-6) {
  std::vector<double> interior(path.interior().begin(), path.interior().end());
  std::vector<double> g(interior.size());
  godel::DiscretePath work = path;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(interior[i]));
    const double keep = interior[i];
    interior[i] = keep + h;
    work.set_interior(interior);
    const double jp = godel::reduced_action(spec, work, bd);
    interior[i] = keep - h;
    work.set_interior(interior);
    const double jm = godel::reduced_action(spec, work, bd);
    interior[i] = keep;
    g[i] = (jp - jm) / (2.0 * h);
  }
  return g;
}

/// Cyclic Jacobi rotation for a symmetric 2x2 matrix, returned as
/// (larger, smaller) eigenvalue.
inline std::array<double, 2> jacobi_eigenvalues(double p, double q, double r) {
  if (q == 0.0) return {std::max(p, r), std::min(p, r)};
  const double theta = 0.5 * std::atan2(2.0 * q, r - p);
  const double c = std::cos(theta), s = std::sin(theta);
  const double e1 = c * c * p - 2.0 * s * c * q + s * s * r;
  const double e2 = s * s * p + 2.0 * s * c * q + c * c * r;
  return {std::max(e1, e2), std::min(e1, e2)};
}

/// Cramer's rule for [[A, B], [B, -C]] (u, v) = (c1, c2).
inline std::array<double, 2> solve_fiber(double A, double B, double C, double c1, double c2) {
  const double det = -A * C - B * B;
  return {(c1 * (-C) - B * c2) / det, (A * c2 - B * c1) / det};
}

/// Unreduced geodesic system on the Euclidean base: state (x, y, t, x', y', t').
/// Base: x'' = 1/2 (grad A y'^2 + 2 grad B y' t' - grad C t'^2).
/// Fibers: d/ds (S (y', t')) = 0, i.e. S (y'', t'')' = -(dS/ds)(y', t').
struct UnreducedState {
  Point x, xd;
  double y = 0, t = 0, yd = 0, td = 0;
};

inline UnreducedState unreduced_rhs(const godel::SpacetimeSpec& spec, const UnreducedState& z) {
  const godel::CoefficientSample s = godel::sample_coefficients(spec, z.x);
  const std::size_t d = z.x.size();
  UnreducedState out;
  out.x = z.xd;
  out.xd.resize(d);
  for (std::size_t k = 0; k < d; ++k)
    out.xd[k] = 0.5 * (s.gradA[k] * z.yd * z.yd + 2.0 * s.gradB[k] * z.yd * z.td -
                       s.gradC[k] * z.td * z.td);
  const double ad = godel::dot(s.gradA, z.xd), bd = godel::dot(s.gradB, z.xd),
               cd = godel::dot(s.gradC, z.xd);
  const double r1 = -(ad * z.yd + bd * z.td);
  const double r2 = -(bd * z.yd - cd * z.td);
  const auto acc = solve_fiber(s.A, s.B, s.C, r1, r2);
  out.y = z.yd;
  out.t = z.td;
  out.yd = acc[0];
  out.td = acc[1];
  return out;
}

inline UnreducedState axpy(const UnreducedState& z, double h, const UnreducedState& k) {
  UnreducedState o = z;
  for (std::size_t i = 0; i < z.x.size(); ++i) {
    o.x[i] += h * k.x[i];
    o.xd[i] += h * k.xd[i];
  }
  o.y += h * k.y;
  o.t += h * k.t;
  o.yd += h * k.yd;
  o.td += h * k.td;
  return o;
}

inline UnreducedState integrate_unreduced(const godel::SpacetimeSpec& spec, UnreducedState z,
                                          double s_max, int steps) {
  const double h = s_max / steps;
  for (int n = 0; n < steps; ++n) {
    const UnreducedState k1 = unreduced_rhs(spec, z);
    const UnreducedState k2 = unreduced_rhs(spec, axpy(z, 0.5 * h, k1));
    const UnreducedState k3 = unreduced_rhs(spec, axpy(z, 0.5 * h, k2));
    const UnreducedState k4 = unreduced_rhs(spec, axpy(z, h, k3));
    UnreducedState next = axpy(z, h / 6.0, k1);
    next = axpy(next, h / 3.0, k2);
    next = axpy(next, h / 3.0, k3);
    z = axpy(next, h / 6.0, k4);
  }
  return z;
}

/// Random smooth spec with A, C > 0, so the pointwise h2 criterion passes.
inline godel::SpacetimeSpec random_positive_spec(Rng& rng, int dim = 2) {
  auto coef = [&](double lo, double hi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", rng.uniform(lo, hi));
    return std::string(buf);
  };
  auto wave = [&](const char* fn) {
    std::string s = std::string(fn) + "(";
    for (int k = 1; k <= dim; ++k) s += (k > 1 ? "+" : "") + coef(-1.5, 1.5) + "*x" + std::to_string(k);
    return s + "+" + coef(0.0, 3.0) + ")";
  };
  const std::string A = coef(0.8, 1.5) + "*(1+" + coef(0.0, 0.4) + "*" + wave("sin") + ")";
  const std::string C = coef(0.8, 1.5) + "*(1+" + coef(0.0, 0.4) + "*" + wave("cos") + ")";
  const std::string B = coef(-0.8, 0.8) + "*" + wave("sin");
  return godel::make_custom(dim, A, B, C);
}

/// Random spec that may have indefinite L (for identity checks only).
inline godel::SpacetimeSpec random_general_spec(Rng& rng, int dim = 2) {
  auto coef = [&](double lo, double hi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", rng.uniform(lo, hi));
    return std::string(buf);
  };
  // H = B^2 + A C with B bounded away from 0 keeps the spec Lorentzian
  const std::string A = coef(-1.0, 1.0) + "+" + coef(0.0, 0.3) + "*sin(x1)";
  const std::string C = coef(-1.0, 1.0) + "+" + coef(0.0, 0.3) + "*cos(x" + std::to_string(dim) + ")";
  const std::string B = coef(1.5, 2.5) + "+" + coef(0.0, 0.3) + "*sin(x1+x" + std::to_string(dim) + ")";
  return godel::make_custom(dim, A, B, C);
}

}  // namespace oracle
