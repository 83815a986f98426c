#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"

using namespace godel;

namespace {

SpacetimeSpec godel_spec(double omega = 1.0 / std::sqrt(2.0)) {
  BuiltinParams p;
  p.reals["omega"] = omega;
  return instantiate_builtin("godel", p);
}

SpacetimeSpec kerr_schild(const std::string& v) {
  BuiltinParams p;
  p.fields["V"] = v;
  return instantiate_builtin("kerr_schild", p);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Spacetime, GodelAtOrigin) {
  const CoefficientSample s = sample_coefficients(godel_spec(), Point{0.0, 0.0});
  EXPECT_NEAR(s.A, -0.5, 1e-15);
  EXPECT_NEAR(s.B, -1.0, 1e-15);
  EXPECT_EQ(s.C, 1.0);
  EXPECT_NEAR(s.H, 0.5, 1e-15);
}

TEST(Spacetime, KerrSchildConstant) {
  const CoefficientSample s = sample_coefficients(kerr_schild("0.5"), Point{3.0, -7.0});
  EXPECT_EQ(s.A, 1.5);
  EXPECT_EQ(s.B, 0.5);
  EXPECT_EQ(s.C, 0.5);
  EXPECT_EQ(s.H, 1.0);
}

TEST(Spacetime, KerrSchildQuadraticV) {
  const CoefficientSample s = sample_coefficients(kerr_schild("x1^2"), Point{2.0, 0.0});
  EXPECT_EQ(s.A, 5.0);
  EXPECT_EQ(s.B, 4.0);
  EXPECT_EQ(s.C, -3.0);
  EXPECT_EQ(s.H, 1.0);
}

TEST(Spacetime, StationaryFlat) {
  BuiltinParams p;
  p.fields["delta"] = "0";
  p.fields["beta"] = "1";
  const CoefficientSample s = sample_coefficients(instantiate_builtin("stationary", p), Point{1, 2});
  EXPECT_EQ(s.A, 1.0);
  EXPECT_EQ(s.B, 0.0);
  EXPECT_EQ(s.C, 1.0);
  EXPECT_EQ(s.H, 1.0);
}

TEST(Spacetime, LorentzViolationReportsPointAndH) {
  const SpacetimeSpec s = make_custom(2, "1", "0", "-1");
  try {
    sample_coefficients(s, Point{0.25, 0.5});
    FAIL();
  } catch (const LorentzViolation& e) {
    EXPECT_EQ(e.point(), (Point{0.25, 0.5}));
    EXPECT_EQ(e.h_value(), -1.0);
  }
}

TEST(Spacetime, BuiltinParameterValidation) {
  EXPECT_THROW(instantiate_builtin("godel", {}), InvalidArgument);
  BuiltinParams bad;
  bad.reals["omega"] = -1.0;
  EXPECT_THROW(instantiate_builtin("godel", bad), InvalidArgument);
  EXPECT_THROW(instantiate_builtin("kerr_schild", {}), InvalidArgument);
  EXPECT_THROW(instantiate_builtin("nonesuch", {}), InvalidArgument);
  BuiltinParams pf;
  pf.fields["H0"] = "x1^2 + t";
  EXPECT_THROW(instantiate_builtin("pfw", pf), InvalidArgument);
  BuiltinParams gs;
  gs.fields["g"] = "exp(x2)";
  EXPECT_THROW(instantiate_builtin("godel_synge", gs), InvalidArgument);
  BuiltinParams dim3;
  dim3.dim = 3;
  dim3.reals["omega"] = 1.0;
  EXPECT_THROW(instantiate_builtin("godel", dim3), InvalidArgument);
}

TEST(Spacetime, KillingMatrixExamples) {
  auto det = [](const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; };
  const Matrix2 flat = killing_matrix(sample_coefficients(make_custom(2, "1", "0", "1"), Point{0, 0}));
  EXPECT_EQ(flat[0][0], 1.0);
  EXPECT_EQ(flat[1][1], -1.0);
  EXPECT_EQ(det(flat), -1.0);
  const Matrix2 g = killing_matrix(sample_coefficients(godel_spec(), Point{0, 0}));
  EXPECT_NEAR(g[0][0], -0.5, 1e-15);
  EXPECT_NEAR(g[0][1], -1.0, 1e-15);
  EXPECT_NEAR(g[1][1], -1.0, 1e-15);
  EXPECT_NEAR(det(g), -0.5, 1e-12);
  const Matrix2 k = killing_matrix(sample_coefficients(kerr_schild("0.5"), Point{0, 0}));
  EXPECT_EQ(k[0][0], 1.5);
  EXPECT_EQ(k[0][1], 0.5);
  EXPECT_EQ(k[1][1], -0.5);
  EXPECT_NEAR(det(k), -1.0, 1e-12);
}

TEST(Spacetime, SpectralExamples) {
  const SpectralData flat = spectral(1.0, 0.0, 1.0);
  EXPECT_EQ(flat.lambda_plus, 1.0);
  EXPECT_EQ(flat.lambda_minus, -1.0);
  EXPECT_EQ(flat.mu, 2.0);
  EXPECT_EQ(flat.frame[0][0], 1.0);
  EXPECT_EQ(flat.frame[1][1], 1.0);
  EXPECT_EQ(flat.frame[0][1], 0.0);
  EXPECT_EQ(flat.frame[1][0], 0.0);

  const SpectralData g = spectral(-0.5, -1.0, 1.0);
  EXPECT_NEAR(g.lambda_plus, 0.2807764064, 1e-9);
  EXPECT_NEAR(g.lambda_minus, -1.7807764064, 1e-9);
  EXPECT_NEAR(g.mu, 3.5615528128, 1e-9);
  const auto jac = oracle::jacobi_eigenvalues(-0.5, -1.0, -1.0);
  EXPECT_NEAR(g.lambda_plus, jac[0], 1e-14);
  EXPECT_NEAR(g.lambda_minus, jac[1], 1e-14);

  const SpectralData anti = spectral(0.0, 1.0, 0.0);
  EXPECT_NEAR(anti.lambda_plus, 1.0, 1e-15);
  EXPECT_NEAR(anti.lambda_minus, -1.0, 1e-15);
  EXPECT_NEAR(anti.mu, 2.0, 1e-15);
}

TEST(Spacetime, RandomSpectralIdentities) {
  oracle::Rng rng(5);
  int done = 0;
  while (done < 1000) {
    const double A = rng.uniform(-5, 5), B = rng.uniform(-5, 5), C = rng.uniform(-5, 5);
    const double H = B * B + A * C;
    if (!(H > 1e-6)) continue;
    ++done;
    const SpectralData sp = spectral(A, B, C);
    EXPECT_GT(sp.lambda_plus, 0.0);
    EXPECT_LT(sp.lambda_minus, 0.0);
    EXPECT_LT(rel(sp.lambda_plus * sp.lambda_minus, -H), 1e-10);
    EXPECT_LT(std::abs(sp.mu + 2.0 * sp.lambda_minus) / std::max(1.0, sp.mu), 1e-10);
    EXPECT_LT(rel(sp.mu, mu_closed_form(A, B, C)), 1e-12);
    const auto jac = oracle::jacobi_eigenvalues(A, B, -C);
    EXPECT_LT(rel(sp.lambda_plus, jac[0]), 1e-10);
    EXPECT_LT(rel(sp.lambda_minus, jac[1]), 1e-10);
    // Q^T S Q diagonal, columns orthonormal, sign convention
    const Matrix2& Q = sp.frame;
    const double s00 = A, s01 = B, s11 = -C;
    auto quad = [&](int i, int j) {
      return Q[0][i] * (s00 * Q[0][j] + s01 * Q[1][j]) + Q[1][i] * (s01 * Q[0][j] + s11 * Q[1][j]);
    };
    const double scale = std::max(1.0, std::abs(sp.lambda_minus));
    EXPECT_LT(std::abs(quad(0, 1)) / scale, 1e-10);
    EXPECT_LT(std::abs(quad(0, 0) - sp.lambda_plus) / scale, 1e-10);
    EXPECT_LT(std::abs(quad(1, 1) - sp.lambda_minus) / scale, 1e-10);
    EXPECT_NEAR(Q[0][0] * Q[0][0] + Q[1][0] * Q[1][0], 1.0, 1e-14);
    EXPECT_NEAR(Q[0][0] * Q[0][1] + Q[1][0] * Q[1][1], 0.0, 1e-14);
    for (int c = 0; c < 2; ++c) {
      EXPECT_GE(Q[0][c], 0.0);
      if (Q[0][c] == 0.0) {
        EXPECT_EQ(Q[1][c], 1.0);
      }
    }
  }
}

TEST(Spacetime, KerrSchildHIsOneForRandomV) {
  oracle::Rng rng(8);
  for (const char* v : {"sin(x1)*x2", "x1^2-3*x2", "exp(x1)/(2+cos(x2))"}) {
    const SpacetimeSpec s = kerr_schild(v);
    for (int i = 0; i < 100; ++i) {
      const CoefficientValues c = sample_values(s, rng.point(2, -2, 2));
      EXPECT_NEAR(c.H, 1.0, 1e-12);
    }
  }
}

TEST(Spacetime, GodelHFormula) {
  oracle::Rng rng(9);
  for (double omega : {0.5, 1.0 / std::sqrt(2.0), 1.0}) {
    const SpacetimeSpec s = godel_spec(omega);
    for (int i = 0; i < 100; ++i) {
      const double x1 = rng.uniform(-3, 3);
      const double H = sample_values(s, Point{x1, rng.uniform(-3, 3)}).H;
      const double expect = std::exp(2.0 * std::sqrt(2.0) * omega * x1) / 2.0;
      EXPECT_LT(std::abs(H - expect) / expect, 1e-12);
    }
  }
}

TEST(Spacetime, PfwHasUnitH) {
  BuiltinParams p;
  p.fields["H0"] = "x1^2 - x2^2 + 3";
  const SpacetimeSpec s = instantiate_builtin("pfw", p);
  oracle::Rng rng(10);
  for (int i = 0; i < 50; ++i) {
    const Point x = rng.point(2, -2, 2);
    const CoefficientValues c = sample_values(s, x);
    EXPECT_EQ(c.A, 0.0);
    EXPECT_EQ(c.B, 1.0);
    EXPECT_NEAR(c.C, -(x[0] * x[0] - x[1] * x[1] + 3.0), 1e-12);
    EXPECT_EQ(c.H, 1.0);
  }
}

TEST(Spacetime, GodelSyngeDefaultsMatchGodelShape) {
  const CoefficientSample s = sample_coefficients(instantiate_builtin("godel_synge", {}), Point{0.0, 5.0});
  EXPECT_NEAR(s.A, -0.5, 1e-15);
  EXPECT_NEAR(s.B, -1.0, 1e-15);
  EXPECT_EQ(s.C, 1.0);
}

TEST(Spacetime, BaseMetricChecks) {
  SpacetimeSpec s = make_custom(2, "1", "0", "1");
  set_base_metric(s, {"1+x1^2", "0", "0", "1"});
  const BaseMetricSample g = sample_base_metric(s, Point{2.0, 0.0});
  EXPECT_EQ(g.g[0], 5.0);
  EXPECT_EQ(g.dg[0], 4.0);  // d_1 g_11
  EXPECT_EQ(g.inner(Point{1.0, 1.0}, Point{1.0, 1.0}), 6.0);
  SpacetimeSpec bad = make_custom(2, "1", "0", "1");
  set_base_metric(bad, {"1", "x1", "0", "1"});
  EXPECT_THROW(sample_base_metric(bad, Point{1.0, 0.0}), InvalidArgument);
  SpacetimeSpec indefinite = make_custom(2, "1", "0", "1");
  set_base_metric(indefinite, {"1", "0", "0", "-1"});
  EXPECT_THROW(sample_base_metric(indefinite, Point{0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(set_base_metric(s, {"1", "0", "1"}), InvalidArgument);
}
