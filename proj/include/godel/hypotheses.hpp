#pragma once

// Sampling-based checkers for the sufficient conditions of the connectedness
// and completeness theorems. Path-space conditions are reduced to pointwise
// sufficient criteria plus constant-path counterexamples, so INCONCLUSIVE is
// a legitimate outcome.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "godel/error.hpp"
#include "godel/linalg.hpp"
#include "godel/pathspace.hpp"
#include "godel/spacetime.hpp"

namespace godel {

inline constexpr const char* kSamplingCaveat = "sampling-based; PASS is evidence, not proof";

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

/// Shells of fixed radius around a center, sampled deterministically.
struct Region {
  Point center;
  std::vector<double> radii;
  int samples_per_shell = 64;
  std::uint64_t seed = 0;

  void validate(int dim) const {
    if (center.size() != static_cast<std::size_t>(dim))
      throw InvalidArgument("region center dimension does not match the spacetime");
    if (radii.empty()) throw InvalidArgument("region needs at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
        throw InvalidArgument("region radii must be positive and finite");
      if (i > 0 && !(radii[i] > radii[i - 1]))
        throw InvalidArgument("region radii must be strictly increasing");
    }
    if (samples_per_shell < 1) throw InvalidArgument("samples_per_shell must be positive");
  }

  /// Geometric radii r0, r0*q, ..., up to r_max (inclusive).
  static Region geometric(Point center, double r0, double r_max, double ratio, int per_shell,
                          std::uint64_t seed) {
    Region r;
    r.center = std::move(center);
    for (double x = r0; x <= r_max * (1.0 + 1e-12); x *= ratio) r.radii.push_back(x);
    r.samples_per_shell = per_shell;
    r.seed = seed;
    return r;
  }
};

struct Shell {
  double radius = 0.0;  // 0 for the center sample
  std::vector<Point> points;
};

namespace detail {
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace detail

/// The center (as a radius-0 shell) followed by one shell per radius. In
/// one dimension a shell is {c - R, c + R}; in two, evenly spaced points on
/// the circle with a seeded rotation; otherwise seeded uniform directions.
inline std::vector<Shell> sample_region(const Region& region, int dim) {
  region.validate(dim);
  const auto ud = static_cast<std::size_t>(dim);
  std::mt19937_64 rng(region.seed);
  std::vector<Shell> shells;
  shells.push_back({0.0, {region.center}});
  for (double r : region.radii) {
    Shell sh{r, {}};
    if (dim == 1) {
      sh.points.push_back({region.center[0] - r});
      sh.points.push_back({region.center[0] + r});
    } else if (dim == 2) {
      const double phase = 2.0 * M_PI * detail::uniform01(rng);
      const int n = region.samples_per_shell;
      for (int j = 0; j < n; ++j) {
        const double th = phase + 2.0 * M_PI * j / n;
        sh.points.push_back({region.center[0] + r * std::cos(th), region.center[1] + r * std::sin(th)});
      }
    } else {
      for (int j = 0; j < region.samples_per_shell; ++j) {
        Point dir(ud);
        double norm = 0.0;
        while (norm < 1e-8) {
          for (std::size_t k = 0; k < ud; k += 2) {
            // Box-Muller, spelled out so the stream is identical on every library
            const double u1 = 1.0 - detail::uniform01(rng);
            const double u2 = detail::uniform01(rng);
            const double rad = std::sqrt(-2.0 * std::log(u1));
            dir[k] = rad * std::cos(2.0 * M_PI * u2);
            if (k + 1 < ud) dir[k + 1] = rad * std::sin(2.0 * M_PI * u2);
          }
          norm = std::sqrt(dot(dir, dir));
        }
        Point x(ud);
        for (std::size_t k = 0; k < ud; ++k) x[k] = region.center[k] + r * dir[k] / norm;
        sh.points.push_back(std::move(x));
      }
    }
    shells.push_back(std::move(sh));
  }
  return shells;
}

struct ShellStat {
  double radius = 0.0;
  double max_field = -std::numeric_limits<double>::infinity();
  /// sup over the shell of field / (d^p + 1), p the growth exponent
  double growth_ratio = -std::numeric_limits<double>::infinity();
  /// min over the shell of bound - field
  double margin = std::numeric_limits<double>::infinity();
  Point worst_point;
  int violations = 0;
};

struct HypothesisReport {
  std::string condition;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<GrowthWitness> witness;
  std::map<std::string, double> values;
  Point worst_point;
  double margin = std::numeric_limits<double>::quiet_NaN();
  std::optional<Point> counterexample;
  std::vector<ShellStat> shells;
  std::string detail;
  std::string caveat = kSamplingCaveat;
};

using ScalarField = std::function<double(std::span<const double>)>;

/// FAIL test shared by every inequality check.
inline bool violates(double value, double bound) {
  return value - bound > 1e-12 * std::max(1.0, std::abs(bound));
}

/// field(x) <= lambda d(x, x0)^exponent + k on every sample.
inline HypothesisReport check_growth(const std::string& condition, const ScalarField& field,
                                     const Region& region, int dim, const GrowthWitness& w,
                                     double exponent = 2.0) {
  if (!(w.lambda >= 0.0) || !std::isfinite(w.lambda) || !std::isfinite(w.k))
    throw InvalidArgument("growth witness needs finite lambda >= 0 and finite k");
  if (w.x0.size() != static_cast<std::size_t>(dim))
    throw InvalidArgument("witness center dimension does not match the spacetime");
  HypothesisReport rep;
  rep.condition = condition;
  rep.witness = w;
  rep.margin = std::numeric_limits<double>::infinity();
  for (const Shell& sh : sample_region(region, dim)) {
    ShellStat st;
    st.radius = sh.radius;
    for (const Point& x : sh.points) {
      const double dist = std::sqrt(squared_distance(x, w.x0));
      const double dp = exponent == 2.0 ? dist * dist : std::pow(dist, exponent);
      const double bound = w.lambda * dp + w.k;
      const double v = field(x);
      st.max_field = std::max(st.max_field, v);
      st.growth_ratio = std::max(st.growth_ratio, v / (dp + 1.0));
      const double m = bound - v;
      if (m < st.margin) {
        st.margin = m;
        st.worst_point = x;
      }
      if (violates(v, bound)) {
        ++st.violations;
        if (!rep.counterexample) rep.counterexample = x;
      }
    }
    if (st.margin < rep.margin) {
      rep.margin = st.margin;
      rep.worst_point = st.worst_point;
    }
    rep.shells.push_back(std::move(st));
  }
  rep.verdict = rep.counterexample ? Verdict::Fail : Verdict::Pass;
  return rep;
}

inline HypothesisReport check_quadratic_growth(const ScalarField& field, const Region& region,
                                               int dim, const GrowthWitness& w) {
  return check_growth("quadratic_growth", field, region, dim, w, 2.0);
}

/// Least-squares fit of field ~ lambda d^p + k over the innermost shells,
/// with lambda clamped to >= 0 and k raised until the fitted samples hold.
/// The caller must still run the sweep; nothing here certifies the fit.
inline GrowthWitness fit_growth_witness(const ScalarField& field, const Region& region, int dim,
                                        double exponent = 2.0, int shells_used = 0) {
  const std::vector<Shell> shells = sample_region(region, dim);
  const std::size_t use =
      shells_used > 0 ? std::min(shells.size(), static_cast<std::size_t>(shells_used) + 1)
                      : std::max<std::size_t>(2, (shells.size() + 1) / 2);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < use && i < shells.size(); ++i)
    for (const Point& x : shells[i].points) {
      xs.push_back(std::pow(std::sqrt(squared_distance(x, region.center)), exponent));
      ys.push_back(field(x));
    }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  double lambda = den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  lambda = std::max(0.0, lambda);
  double k = (sy - lambda * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i) k = std::max(k, ys[i] - lambda * xs[i]);
  return {lambda, k, region.center};
}

namespace detail {

struct CoefficientScan {
  double inf_a = std::numeric_limits<double>::infinity();    // inf A/H
  double inf_c = std::numeric_limits<double>::infinity();    // inf C/H
  double inf_neg_c = std::numeric_limits<double>::infinity();  // inf -C/H
  double inf_abs_b = std::numeric_limits<double>::infinity();  // inf |B|/H
  bool b_positive = true, b_negative = true;
  bool a_const_one = true, b_zero = true, a_equals_c = true, a_c_zero = true;
  double min_a = std::numeric_limits<double>::infinity();
  std::vector<Point> points;
  std::vector<CoefficientValues> values;
};

inline bool close(double u, double v) { return std::abs(u - v) <= 1e-14 * (1.0 + std::abs(u)); }

inline CoefficientScan scan(const SpacetimeSpec& spec, const Region& region) {
  CoefficientScan s;
  for (const Shell& sh : sample_region(region, spec.dim))
    for (const Point& x : sh.points) {
      const CoefficientValues c = sample_values(spec, x);
      s.inf_a = std::min(s.inf_a, c.A / c.H);
      s.inf_c = std::min(s.inf_c, c.C / c.H);
      s.inf_neg_c = std::min(s.inf_neg_c, -c.C / c.H);
      s.inf_abs_b = std::min(s.inf_abs_b, std::abs(c.B) / c.H);
      s.b_positive = s.b_positive && c.B > 0.0;
      s.b_negative = s.b_negative && c.B < 0.0;
      s.a_const_one = s.a_const_one && c.A == 1.0;
      s.b_zero = s.b_zero && c.B == 0.0;
      s.a_equals_c = s.a_equals_c && close(c.A, c.C);
      s.a_c_zero = s.a_c_zero && c.A == 0.0 && c.C == 0.0;
      s.min_a = std::min(s.min_a, c.A);
      s.points.push_back(x);
      s.values.push_back(c);
    }
  return s;
}

inline ScalarField coefficient_field(const SpacetimeSpec& spec,
                                     std::function<double(const CoefficientValues&)> f) {
  return [&spec, f = std::move(f)](std::span<const double> x) { return f(sample_values(spec, x)); };
}

}  // namespace detail

/// L >= nu > 0 on all paths, through pointwise bounds: a >= inf A/H,
/// c >= inf C/H and, for sign-definite B, |b| >= inf |B|/H. Never FAILs.
inline HypothesisReport check_h2(const SpacetimeSpec& spec, const Region& region) {
  const detail::CoefficientScan s = detail::scan(spec, region);
  HypothesisReport rep;
  rep.condition = "h2";
  rep.values["alpha0"] = s.inf_a;
  rep.values["gamma0"] = s.inf_c;
  rep.values["beta0"] = s.inf_abs_b;
  const bool b_definite = s.b_positive || s.b_negative;
  // nu from the first criterion that applies; nu_sharp also uses |b|
  double nu = -std::numeric_limits<double>::infinity();
  double sharp = nu;
  if (s.inf_a > 0.0 && s.inf_c > 0.0) nu = sharp = s.inf_a * s.inf_c;
  if (b_definite && s.inf_abs_b > 0.0 && s.inf_a >= 0.0 && s.inf_c >= 0.0) {
    sharp = s.inf_abs_b * s.inf_abs_b + s.inf_a * s.inf_c;
    if (!(nu > 0.0)) nu = sharp;
  }
  if (nu > 0.0) {
    rep.verdict = Verdict::Pass;
    rep.values["nu"] = nu;
    rep.values["nu_sharp"] = sharp;
    rep.margin = nu;
    rep.detail = "L >= nu on every path via pointwise bounds on A/H, B/H, C/H";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.detail = "no pointwise criterion for L >= nu > 0 applies";
  }
  return rep;
}

/// m(x) >= h(x) > 0 on all paths. PASS through inf max{A/H, -C/H} against
/// sup 1/(lambda d^2 + k); FAIL through a constant path with m < h.
inline HypothesisReport check_h3(const SpacetimeSpec& spec, const Region& region,
                                 const GrowthWitness& w) {
  if (w.x0.size() != static_cast<std::size_t>(spec.dim))
    throw InvalidArgument("witness center dimension does not match the spacetime");
  const detail::CoefficientScan s = detail::scan(spec, region);
  HypothesisReport rep;
  rep.condition = "h3";
  rep.witness = w;
  double sup_h = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const Point& x = s.points[i];
    const CoefficientValues& c = s.values[i];
    const double den = w.lambda * squared_distance(x, w.x0) + w.k;
    if (!(den > 0.0)) throw DomainError("nonpositive lambda d^2 + k in h3 witness", x);
    const double h = 1.0 / den;
    const double m = std::max(c.A / c.H, -c.C / c.H);
    sup_h = std::max(sup_h, h);
    if (m - h < worst) {
      worst = m - h;
      rep.worst_point = x;
    }
    if (violates(h, m) && !rep.counterexample) rep.counterexample = x;
  }
  const double m_lower = std::max(s.inf_a, s.inf_neg_c);
  rep.values["m_lower"] = m_lower;
  rep.values["h_upper"] = sup_h;
  if (rep.counterexample) {
    rep.verdict = Verdict::Fail;
    rep.margin = worst;
    rep.detail = "constant path at the counterexample has m < h";
  } else if (m_lower >= sup_h) {
    rep.verdict = Verdict::Pass;
    rep.margin = m_lower - sup_h;
    rep.detail = "max{inf A/H, inf -C/H} >= sup 1/(lambda d^2 + k)";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.margin = m_lower - sup_h;
    rep.detail = "pointwise bound too weak; no constant-path counterexample";
  }
  return rep;
}

/// A - C > 0 everywhere and H/(A - C) at most quadratic.
inline HypothesisReport check_h3prime(const SpacetimeSpec& spec, const Region& region,
                                      const GrowthWitness& w) {
  const detail::CoefficientScan s = detail::scan(spec, region);
  double min_gap = std::numeric_limits<double>::infinity();
  std::optional<Point> bad;
  Point worst;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const double gap = s.values[i].A - s.values[i].C;
    if (gap < min_gap) {
      min_gap = gap;
      worst = s.points[i];
    }
    if (!(gap > 0.0) && !bad) bad = s.points[i];
  }
  HypothesisReport rep;
  if (bad) {
    rep.condition = "h3prime";
    rep.verdict = Verdict::Fail;
    rep.witness = w;
    rep.counterexample = bad;
    rep.worst_point = worst;
    rep.margin = min_gap;
    rep.detail = "A - C > 0 violated";
  } else {
    rep = check_growth("h3prime", detail::coefficient_field(spec, [](const CoefficientValues& c) {
                         return c.H / (c.A - c.C);
                       }),
                       region, spec.dim, w);
    rep.detail = rep.verdict == Verdict::Pass ? "A - C > 0 and H/(A - C) at most quadratic"
                                              : "H/(A - C) exceeds the quadratic witness";
  }
  rep.values["min_A_minus_C"] = min_gap;
  return rep;
}

/// Stationary form A = 1, B = delta, C = beta > 0: beta at most quadratic
/// (witness w1) and delta at most linear (witness w2).
inline HypothesisReport check_s2(const SpacetimeSpec& spec, const Region& region,
                                 const GrowthWitness& w1, const GrowthWitness& w2) {
  if (!spec.A.is_constant() || evaluate(spec.A, Point(static_cast<std::size_t>(spec.dim))) != 1.0)
    throw InvalidArgument("s2 needs a stationary spacetime with A identically 1");
  const detail::CoefficientScan s = detail::scan(spec, region);
  HypothesisReport rep;
  rep.condition = "s2";
  rep.witness = w1;
  for (std::size_t i = 0; i < s.points.size(); ++i)
    if (!(s.values[i].C > 0.0)) {
      rep.verdict = Verdict::Fail;
      rep.counterexample = s.points[i];
      rep.worst_point = s.points[i];
      rep.margin = s.values[i].C;
      rep.detail = "beta > 0 violated";
      return rep;
    }
  HypothesisReport beta = check_growth(
      "s2_beta", detail::coefficient_field(spec, [](const CoefficientValues& c) { return c.C; }),
      region, spec.dim, w1, 2.0);
  HypothesisReport delta = check_growth(
      "s2_delta", detail::coefficient_field(spec, [](const CoefficientValues& c) { return c.B; }),
      region, spec.dim, w2, 1.0);
  rep.values["beta_margin"] = beta.margin;
  rep.values["delta_margin"] = delta.margin;
  rep.values["lambda2"] = w2.lambda;
  rep.values["k2"] = w2.k;
  const HypothesisReport& failing = beta.verdict == Verdict::Fail ? beta : delta;
  if (failing.verdict == Verdict::Fail) {
    rep.verdict = Verdict::Fail;
    rep.counterexample = failing.counterexample;
    rep.detail = &failing == &beta ? "beta exceeds the quadratic witness"
                                   : "delta exceeds the linear witness";
  } else {
    rep.verdict = Verdict::Pass;
    rep.detail = "beta at most quadratic and delta at most linear";
  }
  const bool beta_worse = beta.margin <= delta.margin;
  rep.margin = beta_worse ? beta.margin : delta.margin;
  rep.worst_point = beta_worse ? beta.worst_point : delta.worst_point;
  rep.shells = beta.shells;
  return rep;
}

/// 1/mu at most quadratic (the completeness criterion).
inline HypothesisReport check_c2(const SpacetimeSpec& spec, const Region& region,
                                 const GrowthWitness& w) {
  HypothesisReport rep = check_growth(
      "c2", detail::coefficient_field(spec, [](const CoefficientValues& c) {
        return 1.0 / mu_closed_form(c.A, c.B, c.C);
      }),
      region, spec.dim, w);
  rep.detail = rep.verdict == Verdict::Pass ? "1/mu at most quadratic" : "1/mu exceeds the witness";
  return rep;
}

/// L <= -nu < 0 on all paths together with A - C < 0. A constant path at x
/// has L = 1/H(x) > 0, so the first sample is always a counterexample.
inline HypothesisReport check_L_negative(const SpacetimeSpec& spec, const Region& region) {
  region.validate(spec.dim);
  const CoefficientValues c = sample_values(spec, region.center);
  HypothesisReport rep;
  rep.condition = "L_negative";
  rep.verdict = Verdict::Fail;
  rep.counterexample = region.center;
  rep.worst_point = region.center;
  rep.margin = -1.0 / c.H;
  rep.values["L_constant_path"] = 1.0 / c.H;
  rep.detail = "constant path has L = 1/H > 0";
  return rep;
}

struct VerdictWitnesses {
  GrowthWitness growth;       // h3, h3', s2 (beta) and the special-case routes
  GrowthWitness linear;       // s2 (delta)
  GrowthWitness completeness; // c2
};

struct RouteResult {
  std::string route;
  bool applicable = false;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<HypothesisReport> reports;
  std::string note;
};

struct TheoremSummary {
  std::vector<RouteResult> routes;
  Verdict connectedness = Verdict::Inconclusive;
  std::vector<std::string> passing_routes;
  HypothesisReport completeness;
  std::string summary;
};

namespace detail {
inline Verdict combine(std::initializer_list<Verdict> vs) {
  bool all_pass = true;
  for (Verdict v : vs) {
    if (v == Verdict::Fail) return Verdict::Fail;
    all_pass = all_pass && v == Verdict::Pass;
  }
  return all_pass ? Verdict::Pass : Verdict::Inconclusive;
}
}  // namespace detail

/// Runs every applicable connectedness route and the completeness check.
/// Connectedness is PASS when some route passes, FAIL when every applicable
/// route fails, INCONCLUSIVE otherwise. Base completeness (h1) is taken for
/// granted on the Euclidean base; for a user metric it is the user's call.
inline TheoremSummary theorem_verdicts(const SpacetimeSpec& spec, const Region& region,
                                       const VerdictWitnesses& w) {
  TheoremSummary out;
  const detail::CoefficientScan s = detail::scan(spec, region);
  const HypothesisReport h2 = check_h2(spec, region);
  const std::string h1_note =
      spec.euclidean_base() ? "" : "h1 (completeness of the base metric) is not checked";

  {
    RouteResult r{"h1+h2+h3", true, Verdict::Inconclusive, {h2, check_h3(spec, region, w.growth)}, h1_note};
    r.verdict = detail::combine({r.reports[0].verdict, r.reports[1].verdict});
    out.routes.push_back(std::move(r));
  }
  {
    RouteResult r{"h1+h2+h3prime", true, Verdict::Inconclusive,
                  {h2, check_h3prime(spec, region, w.growth)}, h1_note};
    r.verdict = detail::combine({r.reports[0].verdict, r.reports[1].verdict});
    out.routes.push_back(std::move(r));
  }
  {
    RouteResult r{"s2", s.a_const_one, Verdict::Inconclusive, {}, "needs A identically 1"};
    if (r.applicable) {
      r.reports.push_back(check_s2(spec, region, w.growth, w.linear));
      r.verdict = r.reports[0].verdict;
      r.note = h1_note;
    }
    out.routes.push_back(std::move(r));
  }
  {
    RouteResult r{"L_negative", true, Verdict::Fail, {check_L_negative(spec, region)},
                  "constant paths always have L > 0"};
    out.routes.push_back(std::move(r));
  }
  {
    RouteResult r{"static", s.b_zero && s.min_a > 0.0, Verdict::Inconclusive, {},
                  "needs B identically 0 and A > 0"};
    if (r.applicable) {
      HypothesisReport g = check_growth(
          "static_beta", detail::coefficient_field(spec, [](const CoefficientValues& c) { return c.C; }),
          region, spec.dim, w.growth);
      r.verdict = g.verdict;
      r.reports.push_back(std::move(g));
      r.note = "beta = C at most quadratic";
    }
    out.routes.push_back(std::move(r));
  }
  {
    RouteResult r{"a_equiv_c", s.a_equals_c && s.min_a > 0.0, Verdict::Inconclusive, {},
                  "needs A identically equal to C and A > 0"};
    if (r.applicable) {
      HypothesisReport g = check_growth(
          "a_equiv_c_growth",
          detail::coefficient_field(spec, [](const CoefficientValues& c) { return c.H / c.A; }),
          region, spec.dim, w.growth);
      r.verdict = g.verdict;
      r.reports.push_back(std::move(g));
      r.note = "H/A at most quadratic";
    }
    out.routes.push_back(std::move(r));
  }
  {
    RouteResult r{"warped", s.a_c_zero, Verdict::Inconclusive, {}, "needs A and C identically 0"};
    if (r.applicable) {
      HypothesisReport g = check_growth(
          "warped_delta",
          detail::coefficient_field(spec, [](const CoefficientValues& c) { return std::abs(c.B); }),
          region, spec.dim, w.growth);
      r.verdict = g.verdict;
      r.reports.push_back(std::move(g));
      r.note = "|B| at most quadratic";
    }
    out.routes.push_back(std::move(r));
  }

  bool any_pass = false, all_fail = true;
  for (const RouteResult& r : out.routes) {
    if (!r.applicable) continue;
    if (r.verdict == Verdict::Pass) {
      any_pass = true;
      out.passing_routes.push_back(r.route);
    }
    all_fail = all_fail && r.verdict == Verdict::Fail;
  }
  out.connectedness = any_pass ? Verdict::Pass : all_fail ? Verdict::Fail : Verdict::Inconclusive;
  out.completeness = check_c2(spec, region, w.completeness);

  std::string text;
  if (any_pass) {
    text = "connected via";
    for (const std::string& r : out.passing_routes) text += " " + r;
  } else if (all_fail) {
    text = "no connectedness route applies (all routes FAIL)";
  } else {
    text = "no connectedness route applies (inconclusive)";
  }
  text += std::string("; completeness route c2 ") + to_string(out.completeness.verdict);
  out.summary = std::move(text);
  return out;
}

}  // namespace godel
