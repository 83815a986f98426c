#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace godel {

/// A point (or tangent vector) of the base manifold R^d.
using Point = std::vector<double>;

using Matrix2 = std::array<std::array<double, 2>, 2>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double sup_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Eigen-decomposition of the symmetric matrix [[p, q], [q, r]].
///
/// Eigenvalues come from the closed form with the smaller-magnitude one
/// recovered from the determinant, so plus * minus == det to rounding.
/// Each eigenvector is unit length with a nonnegative first component; when
/// the first component is zero the second is +1.
struct SymEigen2 {
  double plus = 0.0;
  double minus = 0.0;
  std::array<double, 2> v_plus{1.0, 0.0};
  std::array<double, 2> v_minus{0.0, 1.0};
};

namespace detail {
inline std::array<double, 2> sym2_eigvec(double p, double q, double r, double lambda,
                                         std::array<double, 2> fallback) {
  std::array<double, 2> u1{q, lambda - p};
  std::array<double, 2> u2{lambda - r, q};
  const double n1 = std::hypot(u1[0], u1[1]);
  const double n2 = std::hypot(u2[0], u2[1]);
  std::array<double, 2> v = n1 >= n2 ? u1 : u2;
  const double n = std::max(n1, n2);
  if (n == 0.0) return fallback;
  v[0] /= n;
  v[1] /= n;
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  if (v[0] == 0.0) v[0] = 0.0;  // drop a negative zero
  return v;
}
}  // namespace detail

inline SymEigen2 eigen_sym2(double p, double q, double r) {
  SymEigen2 e;
  const double half_trace = 0.5 * (p + r);
  const double radius = std::hypot(0.5 * (p - r), q);
  const double det = p * r - q * q;
  if (half_trace >= 0.0) {
    e.plus = half_trace + radius;
    e.minus = e.plus != 0.0 ? det / e.plus : half_trace - radius;
  } else {
    e.minus = half_trace - radius;
    e.plus = det / e.minus;
  }
  e.v_plus = detail::sym2_eigvec(p, q, r, e.plus, {1.0, 0.0});
  e.v_minus = detail::sym2_eigvec(p, q, r, e.minus, {0.0, 1.0});
  if (e.plus == e.minus) {
    e.v_plus = {1.0, 0.0};
    e.v_minus = {0.0, 1.0};
  }
  return e;
}

/// Solves the Dirichlet Laplacian system tridiag(-1, 2, -1) z = rhs in place
/// (Thomas algorithm).
inline void solve_laplacian_inplace(std::span<double> rhs) {
  const std::size_t n = rhs.size();
  if (n == 0) return;
  std::vector<double> c(n);
  double denom = 2.0;
  c[0] = -1.0 / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = 2.0 + c[i - 1];
    c[i] = -1.0 / denom;
    rhs[i] = (rhs[i] + rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

/// Cholesky test for a symmetric d x d matrix stored row-major.
inline bool is_positive_definite(std::span<const double> g, int d) {
  std::vector<double> l(static_cast<std::size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g[static_cast<std::size_t>(i * d + j)];
      for (int k = 0; k < j; ++k)
        s -= l[static_cast<std::size_t>(i * d + k)] * l[static_cast<std::size_t>(j * d + k)];
      if (i == j) {
        if (!(s > 0.0)) return false;
        l[static_cast<std::size_t>(i * d + i)] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(i * d + j)] = s / l[static_cast<std::size_t>(j * d + j)];
      }
    }
  }
  return true;
}

/// Inverse of a small symmetric positive definite matrix by Gauss-Jordan.
inline std::vector<double> invert_spd(std::span<const double> g, int d) {
  const auto n = static_cast<std::size_t>(d);
  std::vector<double> a(g.begin(), g.end());
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (piv != col)
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[col * n + k], a[piv * n + k]);
        std::swap(inv[col * n + k], inv[piv * n + k]);
      }
    const double pv = a[col * n + col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col * n + k] /= pv;
      inv[col * n + k] /= pv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[col * n + k];
        inv[r * n + k] -= f * inv[col * n + k];
      }
    }
  }
  return inv;
}

}  // namespace godel
