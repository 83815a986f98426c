#pragma once

// Goedel-type spacetimes M0 x R^2 with metric
//
//   <.,.>_R + A(x) dy^2 + 2 B(x) dy dt - C(x) dt^2,     H = B^2 + A C > 0,
//
// the builtin zoo, and pointwise derived quantities (Killing matrix S(x),
// its eigenvalues, mu(x)).
//
// The base M0 is R^d. Its metric defaults to the Euclidean one; a
// user-supplied metric field is accepted, but completeness of that metric is
// the caller's responsibility, and base distances are always Euclidean.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "godel/error.hpp"
#include "godel/expr.hpp"
#include "godel/linalg.hpp"

namespace godel {

struct SpacetimeSpec {
  int dim = 2;
  std::string label;
  std::string family = "custom";
  ExprAst A, B, C;
  /// Row-major d x d entries of the base metric; empty means Euclidean.
  std::vector<ExprAst> base_metric;
  /// Parameters and source text the spec was built from (for reports).
  std::map<std::string, double> params;
  std::map<std::string, std::string> sources;

  bool euclidean_base() const noexcept { return base_metric.empty(); }
};

struct CoefficientSample {
  double A = 0, B = 0, C = 0, H = 0;
  std::vector<double> gradA, gradB, gradC;

  std::vector<double> gradH() const {
    std::vector<double> g(gradA.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = 2.0 * B * gradB[i] + A * gradC[i] + C * gradA[i];
    return g;
  }
};

/// Value-only coefficients, for sampling near abs() kinks.
struct CoefficientValues {
  double A = 0, B = 0, C = 0, H = 0;
};

struct SpectralData {
  double lambda_plus = 0.0;   // > 0
  double lambda_minus = 0.0;  // < 0
  double mu = 0.0;            // -2 lambda_minus
  Matrix2 frame{};            // columns: unit eigenvectors for lambda_plus, lambda_minus
};

struct BaseMetricSample {
  int dim = 0;
  std::vector<double> g;   // g[i*d + j]
  std::vector<double> dg;  // dg[k*d*d + i*d + j] = d_k g_ij

  double inner(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s += a[i] * g[static_cast<std::size_t>(i * dim + j)] * b[j];
    return s;
  }
};

inline CoefficientSample sample_coefficients_unchecked(const SpacetimeSpec& spec,
                                                       std::span<const double> x) {
  FieldSample a = eval_with_gradient(spec.A, x);
  FieldSample b = eval_with_gradient(spec.B, x);
  FieldSample c = eval_with_gradient(spec.C, x);
  CoefficientSample s;
  s.A = a.value;
  s.B = b.value;
  s.C = c.value;
  s.H = s.B * s.B + s.A * s.C;
  s.gradA = std::move(a.gradient);
  s.gradB = std::move(b.gradient);
  s.gradC = std::move(c.gradient);
  return s;
}

/// A, B, C, H and their gradients at x. Throws LorentzViolation if H(x) <= 0.
inline CoefficientSample sample_coefficients(const SpacetimeSpec& spec, std::span<const double> x) {
  CoefficientSample s = sample_coefficients_unchecked(spec, x);
  if (!(s.H > 0.0)) throw LorentzViolation({x.begin(), x.end()}, s.H);
  return s;
}

inline CoefficientValues sample_values(const SpacetimeSpec& spec, std::span<const double> x) {
  CoefficientValues v;
  v.A = evaluate(spec.A, x);
  v.B = evaluate(spec.B, x);
  v.C = evaluate(spec.C, x);
  v.H = v.B * v.B + v.A * v.C;
  if (!(v.H > 0.0)) throw LorentzViolation({x.begin(), x.end()}, v.H);
  return v;
}

inline BaseMetricSample sample_base_metric(const SpacetimeSpec& spec, std::span<const double> x) {
  const int d = spec.dim;
  const auto dd = static_cast<std::size_t>(d * d);
  BaseMetricSample m;
  m.dim = d;
  m.g.assign(dd, 0.0);
  m.dg.assign(dd * static_cast<std::size_t>(d), 0.0);
  if (spec.euclidean_base()) {
    for (int i = 0; i < d; ++i) m.g[static_cast<std::size_t>(i * d + i)] = 1.0;
    return m;
  }
  for (std::size_t e = 0; e < dd; ++e) {
    FieldSample f = eval_with_gradient(spec.base_metric[e], x);
    m.g[e] = f.value;
    for (int k = 0; k < d; ++k) m.dg[static_cast<std::size_t>(k) * dd + e] = f.gradient[k];
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) {
      const double gij = m.g[static_cast<std::size_t>(i * d + j)];
      const double gji = m.g[static_cast<std::size_t>(j * d + i)];
      if (std::abs(gij - gji) > 1e-12 * (1.0 + std::abs(gij)))
        throw InvalidArgument("base metric is not symmetric at x = " +
                              detail::format_point({x.begin(), x.end()}));
    }
  if (!is_positive_definite(m.g, d))
    throw InvalidArgument("base metric is not positive definite at x = " +
                          detail::format_point({x.begin(), x.end()}));
  return m;
}

/// S(x) = [[A, B], [B, -C]]; det S = -H.
inline Matrix2 killing_matrix(const CoefficientSample& s) {
  return Matrix2{{{s.A, s.B}, {s.B, -s.C}}};
}

inline SpectralData spectral(double A, double B, double C) {
  const SymEigen2 e = eigen_sym2(A, B, -C);
  SpectralData d;
  d.lambda_plus = e.plus;
  d.lambda_minus = e.minus;
  d.mu = -2.0 * e.minus;
  d.frame = Matrix2{{{e.v_plus[0], e.v_minus[0]}, {e.v_plus[1], e.v_minus[1]}}};
  return d;
}

/// Eigenvalues of S(x): Lambda_+ > 0 > Lambda_- whenever H > 0.
inline SpectralData spectral(const CoefficientSample& s) { return spectral(s.A, s.B, s.C); }

/// mu(x) = C - A + sqrt((A + C)^2 + 4 B^2), evaluated in the closed form.
inline double mu_closed_form(double A, double B, double C) {
  return C - A + std::sqrt((A + C) * (A + C) + 4.0 * B * B);
}

// ---------------------------------------------------------------------------
// Builtin zoo

struct BuiltinParams {
  std::map<std::string, double> reals;
  std::map<std::string, std::string> fields;
  std::optional<int> dim;
};

namespace detail {

inline ExprAst parse_field(const std::string& key, const std::string& text, int dim,
                           const std::map<std::string, double>& constants) {
  ParseOptions opts;
  opts.constants = constants;
  try {
    return parse_expression(text, dim, opts);
  } catch (const ParseError& e) {
    throw InvalidArgument("field '" + key + "': " + e.what());
  }
}

inline std::string field_or(const BuiltinParams& p, const std::string& key,
                            const std::optional<std::string>& fallback) {
  if (auto it = p.fields.find(key); it != p.fields.end()) return it->second;
  if (fallback) return *fallback;
  throw InvalidArgument("missing field parameter '" + key + "'");
}

}  // namespace detail

/// Builds a spec from textual A, B, C over R^dim.
inline SpacetimeSpec make_custom(int dim, const std::string& a, const std::string& b,
                                 const std::string& c,
                                 const std::map<std::string, double>& constants = {},
                                 std::string label = "custom") {
  if (dim < 1 || dim > kMaxDim)
    throw InvalidArgument("base dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  SpacetimeSpec s;
  s.dim = dim;
  s.label = std::move(label);
  s.family = "custom";
  s.A = detail::parse_field("A", a, dim, constants);
  s.B = detail::parse_field("B", b, dim, constants);
  s.C = detail::parse_field("C", c, dim, constants);
  s.params = constants;
  s.sources = {{"A", a}, {"B", b}, {"C", c}};
  return s;
}

/// Attaches a base metric given as d x d expression texts (row-major).
inline void set_base_metric(SpacetimeSpec& spec, const std::vector<std::string>& entries) {
  const auto dd = static_cast<std::size_t>(spec.dim * spec.dim);
  if (entries.size() != dd)
    throw InvalidArgument("base metric needs " + std::to_string(dd) + " entries, got " +
                          std::to_string(entries.size()));
  spec.base_metric.clear();
  for (std::size_t e = 0; e < dd; ++e)
    spec.base_metric.push_back(
        detail::parse_field("base_metric[" + std::to_string(e) + "]", entries[e], spec.dim,
                            spec.params));
}

/// Instantiates one of: godel, godel_synge, kerr_schild, stationary, static,
/// pfw, custom. Real parameters double as named constants in every field.
inline SpacetimeSpec instantiate_builtin(const std::string& name, const BuiltinParams& p) {
  const auto& k = p.reals;
  auto field = [&](const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    return detail::field_or(p, key, std::move(fallback));
  };
  auto paren = [](const std::string& s) { return "(" + s + ")"; };
  auto fixed_dim = [&](int d) {
    if (p.dim && *p.dim != d)
      throw InvalidArgument("family '" + name + "' has base dimension " + std::to_string(d));
    return d;
  };
  const int dim = p.dim.value_or(2);

  SpacetimeSpec s;
  if (name == "godel") {
    auto w = k.find("omega");
    if (w == k.end()) throw InvalidArgument("godel requires parameter 'omega'");
    if (!(w->second > 0.0)) throw InvalidArgument("godel requires omega > 0");
    std::map<std::string, double> consts = k;
    consts["w"] = w->second;
    s = make_custom(fixed_dim(2), "-exp(2*sqrt(2)*w*x1)/2", "-exp(sqrt(2)*w*x1)", "1", consts,
                    "godel");
  } else if (name == "godel_synge") {
    const std::string g = field("g", "exp(2*x1)/2");
    const std::string h = field("h", "exp(x1)");
    s = make_custom(fixed_dim(2), "-" + paren(g), "-" + paren(h), "1", k, "godel_synge");
    for (const auto& [key, text] : {std::pair{"g", g}, std::pair{"h", h}}) {
      ExprAst f = detail::parse_field(key, text, 2, k);
      if (f.uses_variable(1))
        throw InvalidArgument("godel_synge field '" + std::string(key) + "' must depend on x1 only");
    }
    s.sources["g"] = g;
    s.sources["h"] = h;
  } else if (name == "kerr_schild") {
    const std::string v = paren(field("V"));
    s = make_custom(dim, "1+" + v, v, "1-" + v, k, "kerr_schild");
    s.sources["V"] = field("V");
  } else if (name == "stationary") {
    const std::string delta = field("delta", "0");
    const std::string beta = field("beta", "1");
    s = make_custom(dim, "1", paren(delta), paren(beta), k, "stationary");
    s.sources["delta"] = delta;
    s.sources["beta"] = beta;
  } else if (name == "static") {
    const std::string beta = field("beta", "1");
    s = make_custom(dim, "1", "0", paren(beta), k, "static");
    s.sources["beta"] = beta;
  } else if (name == "pfw") {
    const std::string h0 = field("H0");
    ParseOptions opts;
    opts.constants = k;
    opts.aliases["t"] = dim;
    ExprAst probe;
    try {
      probe = parse_expression(h0, dim + 1 > kMaxDim ? kMaxDim : dim + 1, opts);
    } catch (const ParseError& e) {
      throw InvalidArgument(std::string("field 'H0': ") + e.what());
    }
    if (probe.uses_variable(dim))
      throw InvalidArgument("pfw requires an autonomous H0 (no dependence on t)");
    s = make_custom(dim, "0", "1", "-" + paren(h0), k, "pfw");
    s.sources["H0"] = h0;
  } else if (name == "custom") {
    s = make_custom(dim, field("A"), field("B"), field("C"), k, "custom");
  } else {
    throw InvalidArgument("unknown spacetime family '" + name + "'");
  }
  s.family = name;
  return s;
}

}  // namespace godel
