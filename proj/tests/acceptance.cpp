#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "godel/cli.hpp"
#include "support/oracles.hpp"

using namespace godel;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpacetimeSpec flat() { return make_custom(2, "1", "0", "1"); }

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

SpacetimeSpec static_beta(double eps) {
  BuiltinParams p;
  p.reals["eps"] = eps;
  p.fields["beta"] = "1+sqrt(x1^2+x2^2)^(2+eps)";
  return instantiate_builtin("static", p);
}

Region far_region() { return Region::geometric(Point{0, 0}, 0.01, 1e4, 10.0, 32, 0); }
// exp(2 sqrt(2) w x1) overflows long before r = 1e4
Region near_region() { return Region::geometric(Point{0, 0}, 0.01, 100.0, 10.0, 32, 0); }

GrowthWitness w(double lambda, double k) { return {lambda, k, Point{0, 0}}; }

InitialData godel_init() {
  InitialData in;
  in.x = {0.0, 0.0};
  in.xdot = {1.0, 0.0};
  in.tdot = 1.0;
  return in;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

DiscretePath random_path(oracle::Rng& rng, int dim, int n, double amp) {
  DiscretePath p = DiscretePath::straight(rng.point(dim, -1, 1), rng.point(dim, -1, 1), n);
  std::vector<double> in(p.interior().begin(), p.interior().end());
  for (auto& v : in) v += rng.uniform(-amp, amp);
  p.set_interior(in);
  return p;
}

// converged runs shared by criteria 1 and 2
std::vector<std::pair<SpacetimeSpec, std::pair<Endpoints, GeodesicSolution>>>& converged_runs() {
  static std::vector<std::pair<SpacetimeSpec, std::pair<Endpoints, GeodesicSolution>>> runs;
  return runs;
}

Outcome variational_principle() {
  auto& runs = converged_runs();
  runs.clear();
  const Endpoints ep{Point{0, 0}, Point{1, 0}, 0.0, 0.0, 2.0, 1.0};
  double worst_fixed = 0.0;
  bool ok = true;
  for (const SpacetimeSpec& s : {flat(), kerr_schild("0.5")}) {
    const GeodesicSolution sol = minimize_action(s, ep, SolverConfig{});
    ok = ok && sol.converged && sol.residual < 1e-8;
    worst_fixed = std::max(worst_fixed, sol.residual);
    if (sol.converged) runs.push_back({s, {ep, sol}});
  }

  oracle::Rng rng(1);
  int specs = 0, attempts = 0;
  double worst_order = std::numeric_limits<double>::infinity();
  while (specs < 20 && attempts < 200) {
    ++attempts;
    const SpacetimeSpec s = oracle::random_positive_spec(rng);
    const Endpoints e{rng.point(2, -1, 1), rng.point(2, -1, 1), 0.0, 0.0, rng.uniform(-1, 1),
                      rng.uniform(-1, 1)};
    if (check_h2(s, far_region()).verdict != Verdict::Pass) continue;
    ++specs;
    std::vector<double> res;
    for (int n : {32, 64, 128}) {
      SolverConfig cfg;
      cfg.segments = n;
      cfg.restarts = 1;
      cfg.grad_tol = 1e-10;
      cfg.max_iters = 20000;
      const GeodesicSolution sol = minimize_action(s, e, cfg);
      if (!sol.converged) {
        ok = false;
        res.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      res.push_back(sol.residual);
      runs.push_back({s, {e, sol}});
    }
    const double order = std::min(std::log2(res[0] / res[1]), std::log2(res[1] / res[2]));
    if (!(order >= 1.9)) ok = false;
    worst_order = std::min(worst_order, order);
  }
  ok = ok && specs == 20;
  return {ok, fmt("fixed-spec residual max %.2e; %d random specs, worst order %.3f", worst_fixed, specs,
                  worst_order)};
}

Outcome action_identity() {
  if (converged_runs().empty()) variational_principle();
  int held = 0, total = 0;
  double worst = 0.0;
  for (const auto& [s, run] : converged_runs()) {
    const ActionIdentity id = check_action_identity(s, run.second.path, run.first);
    ++total;
    const double ratio = (id.defect / (1.0 + std::abs(id.f))) / (10.0 * id.tolerance);
    worst = std::max(worst, ratio);
    if (id.holds && ratio < 1.0) ++held;
  }
  return {total > 0 && held == total,
          fmt("%d/%d converged runs; worst |2J-f|/(1+|f|) / (10 tol) = %.3f", held, total, worst)};
}

Outcome gradient() {
  oracle::Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SpacetimeSpec s = oracle::random_positive_spec(rng, 1 + trial % 3);
    const DiscretePath path = random_path(rng, s.dim, 6, 0.3);
    const BoundaryData bd{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto g = action_gradient(s, path, bd);
    const auto fd = oracle::fd_gradient(s, path, bd);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      err = std::max(err, std::abs(g[i] - fd[i]));
      scale = std::max(scale, std::abs(fd[i]));
    }
    worst = std::max(worst, err / std::max(scale, 1e-3));
  }
  return {worst < 1e-6, fmt("50 triples, worst relative error %.2e", worst)};
}

struct Drift {
  double c1 = 0, c2 = 0, Ez = 0;
};

Drift drift_at(double h) {
  StepControl ctl;
  ctl.adaptive = false;
  ctl.h = h;
  const Trajectory tr = integrate_geodesic(godel_spec(), godel_init(), 10.0, ctl);
  Drift d;
  for (const auto& s : tr.samples) {
    d.c1 = std::max(d.c1, s.c1_drift);
    d.c2 = std::max(d.c2, s.c2_drift);
    d.Ez = std::max(d.Ez, s.Ez_drift);
  }
  if (tr.termination != Termination::Completed) d.Ez = std::numeric_limits<double>::infinity();
  return d;
}

Outcome conservation() {
  // c1, c2 are carried exactly by the reduced system, so the order is read off E_z
  std::vector<Drift> d;
  for (double h : {0.04, 0.02, 0.01}) d.push_back(drift_at(h));
  const double o1 = std::log2(d[0].Ez / d[1].Ez), o2 = std::log2(d[1].Ez / d[2].Ez);
  const Drift fine = drift_at(1e-3);
  const double worst_fine = std::max({fine.c1, fine.c2, fine.Ez});
  const double worst_c = std::max({d[0].c1, d[0].c2, d[1].c1, d[1].c2, d[2].c1, d[2].c2});
  const bool ok = o1 >= 3.7 && o2 >= 3.7 && worst_fine < 1e-8 && worst_c < 1e-8;
  return {ok, fmt("E_z order %.2f, %.2f; c1/c2 drift <= %.1e; drift at h=1e-3 %.2e", o1, o2, worst_c,
                  worst_fine)};
}

Outcome round_trip() {
  const SpacetimeSpec s = godel_spec();
  oracle::Rng rng(21);
  double worst_J = 0.0, worst_v = 0.0;
  int ok_count = 0, accepted_other = 0;
  for (int trial = 0; trial < 10; ++trial) {
    InitialData in;
    in.x = rng.point(2, -0.5, 0.5);
    in.xdot = rng.point(2, -1, 1);
    in.ydot = rng.uniform(-1, 1);
    in.tdot = rng.uniform(-1, 1);
    in.y = rng.uniform(-1, 1);
    in.t = rng.uniform(-1, 1);
    StepControl ctl;
    ctl.tol = 1e-13;
    const Trajectory tr = integrate_geodesic(s, in, 1.0, ctl);
    const TrajectorySample end = tr.back();
    const Endpoints ep{in.x, end.x, in.y, in.t, end.y, end.t};
    const double J_true = conserved_from_velocity(s, in.x, in.xdot, in.ydot, in.tdot).Ez / 2.0;

    std::vector<double> J;
    std::vector<Point> v;
    double residual = 0.0;
    bool converged = true;
    for (int n : {64, 128}) {
      SolverConfig cfg;
      cfg.segments = n;
      cfg.restarts = 1;
      cfg.grad_tol = 1e-10;
      cfg.max_iters = 20000;
      const GeodesicSolution sol = minimize_action(s, ep, cfg);
      converged = converged && sol.converged;
      residual = sol.residual;
      J.push_back(sol.action_J);
      const double h = 1.0 / n;
      Point vel(2);
      for (int k = 0; k < 2; ++k)
        vel[k] = (-3.0 * sol.path.node(0)[k] + 4.0 * sol.path.node(1)[k] - sol.path.node(2)[k]) / (2.0 * h);
      v.push_back(vel);
    }
    const double Jx = richardson(J[0], J[1]);
    Point vx(2);
    for (int k = 0; k < 2; ++k) vx[k] = richardson(v[0][k], v[1][k]);
    const double dJ = std::abs(Jx - J_true);
    const double dv = std::hypot(vx[0] - in.xdot[0], vx[1] - in.xdot[1]) / std::hypot(in.xdot[0], in.xdot[1]);
    if (dJ < 1e-6 && dv < 1e-4 && converged) {
      ++ok_count;
      worst_J = std::max(worst_J, dJ);
      worst_v = std::max(worst_v, dv);
    } else if (converged && residual < 1e-3) {
      ++accepted_other;
      std::printf("  round trip %d: distinct connecting geodesic (dJ %.2e, dv %.2e, residual %.2e)\n", trial, dJ,
                  dv, residual);
    }
  }
  return {ok_count + accepted_other == 10,
          fmt("%d/10 recovered (worst dJ %.2e, dv %.2e), %d distinct geodesics", ok_count, worst_J, worst_v,
              accepted_other)};
}

Outcome identities() {
  oracle::Rng rng(33);
  double worst = 0.0;
  int pointwise = 0, paths = 0;
  while (pointwise < 1000) {
    const SpacetimeSpec s = oracle::random_general_spec(rng);
    const CoefficientSample c = sample_coefficients(s, rng.point(2, -3, 3));
    ++pointwise;
    const Matrix2 S = killing_matrix(c);
    const SpectralData sp = spectral(c);
    const double scale = std::max(1.0, std::abs(c.H));
    worst = std::max(worst, std::abs(S[0][0] * S[1][1] - S[0][1] * S[1][0] + c.H) / scale);
    worst = std::max(worst, std::abs(sp.lambda_plus * sp.lambda_minus + c.H) / scale);
    worst = std::max(worst, rel(sp.mu, -2.0 * sp.lambda_minus));
  }
  bool order_ok = true;
  while (paths < 1000) {
    const SpacetimeSpec s = oracle::random_general_spec(rng);
    const DiscretePath path = random_path(rng, 2, 8, 0.3);
    const BoundaryData bd{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const PathFunctionals f = path_integrals(s, path);
    if (std::abs(f.ell) < 1e-3) continue;
    ++paths;
    worst = std::max(worst, rel(f.ell, f.b * f.b + f.a * f.c));
    worst = std::max(worst, rel(f.ell, -f.lam_plus * f.lam_minus));
    worst = std::max(worst, rel(diagonalized_action(s, path, bd).J, reduced_action(s, path, bd)));
    if (f.ell > 0) {
      const double m = path_m_and_h(s, path, w(0, 1)).m;
      if (f.lam_plus < m - 1e-10 * std::max(1.0, std::abs(m))) order_ok = false;
    }
  }
  return {worst < 1e-10 && order_ok,
          fmt("1000 points + 1000 paths, worst relative defect %.2e, lambda+ >= m %s", worst,
              order_ok ? "holds" : "violated")};
}

Outcome completeness() {
  bool ok = true;
  std::string detail;
  for (double omega : {0.5, 1.0 / std::sqrt(2.0), 1.0}) {
    const SpacetimeSpec s = godel_spec(omega);
    const HypothesisReport c2 = check_c2(s, near_region(), w(0, 1));
    const ProbeReport r = completeness_probe(s, godel_init(), w(0, 1), 50.0);
    const bool pass = c2.verdict == Verdict::Pass && r.speed_bound_holds &&
                      r.trajectory.termination == Termination::Completed;
    ok = ok && pass;
    detail += fmt("w=%.4f c2 %s, max speed excess %.1e, %s; ", omega, to_string(c2.verdict),
                  r.max_speed_excess, to_string(r.trajectory.termination));
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome disconnectedness() {
  const SpacetimeSpec e0 = static_beta(0.0), e = static_beta(0.25);
  const ScalarField beta0 = [&e0](std::span<const double> x) { return sample_values(e0, x).C; };
  const ScalarField beta = [&e](std::span<const double> x) { return sample_values(e, x).C; };
  const Region region = far_region();
  const bool pass0 = check_quadratic_growth(beta0, region, 2, w(1, 1)).verdict == Verdict::Pass;

  const double grid[] = {0.1, 1.0, 10.0, 100.0, 1000.0};
  int fails = 0;
  bool reproducible = true;
  std::string holdouts;
  for (double lambda : grid)
    for (double k : grid) {
      const HypothesisReport a = check_quadratic_growth(beta, region, 2, w(lambda, k));
      if (a.verdict == Verdict::Fail) {
        ++fails;
        const HypothesisReport b = check_quadratic_growth(beta, region, 2, w(lambda, k));
        reproducible = reproducible && b.counterexample && *a.counterexample == *b.counterexample;
      } else if (holdouts.size() < 120) {
        holdouts += fmt(" (%g,%g)", lambda, k);
      }
    }
  return {pass0 && fails == 25 && reproducible,
          fmt("eps=0 %s; eps=0.25 FAILs %d/25 witnesses, counterexamples %s; not refuted on R<=1e4:%s",
              pass0 ? "PASS" : "not PASS", fails, reproducible ? "reproducible" : "differ",
              holdouts.empty() ? " none" : holdouts.c_str())};
}

Outcome kerr_route() {
  const TheoremSummary k = theorem_verdicts(kerr_schild("0.5"), far_region(), {w(0, 1), w(0, 1), w(0, 1)});
  const bool kerr_ok = k.connectedness == Verdict::Pass &&
                       std::find(k.passing_routes.begin(), k.passing_routes.end(), "h1+h2+h3prime") !=
                           k.passing_routes.end();
  const TheoremSummary g = theorem_verdicts(godel_spec(), near_region(), {w(0, 1), w(0, 1), w(0, 1)});
  const bool godel_ok = g.passing_routes.empty() && g.completeness.verdict == Verdict::Pass;
  return {kerr_ok && godel_ok, fmt("kerr_schild: %s; godel: %s, c2 %s", k.summary.c_str(), g.summary.c_str(),
                                   to_string(g.completeness.verdict))};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "godel_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const Json configs[] = {
      Json{{"spacetime", {{"family", "kerr_schild"}, {"fields", {{"V", "0.5*sin(x1)"}}}}},
           {"command",
            {{"name", "connect"}, {"x_p", {0.0, 0.0}}, {"x_q", {1.0, 0.5}}, {"y_q", 1.0}, {"t_q", 0.5},
             {"restarts", 3}, {"seed", 11}}}},
      Json{{"spacetime", {{"family", "godel"}, {"params", {{"omega", 1.0}}}}},
           {"command",
            {{"name", "check"}, {"condition", "theorems"},
             {"region", {{"r_min", 0.01}, {"r_max", 100.0}, {"seed", 5}}}}}},
  };
  int identical = 0, compared = 0;
  for (std::size_t i = 0; i < std::size(configs); ++i) {
    const fs::path cfg = root / ("config" + std::to_string(i) + ".json");
    std::ofstream(cfg) << configs[i].dump(2);
    std::vector<fs::path> outs;
    for (const char* run : {"a", "b"}) {
      outs.push_back(root / (std::to_string(i) + run));
      const std::string c = cfg.string(), o = outs.back().string();
      const char* argv[] = {"godel_cli", "--config", c.c_str(), "--out", o.c_str()};
      std::ostringstream out, err;
      if (run_cli(5, argv, out, err) != kExitOk) return {false, "cli run failed: " + err.str()};
    }
    for (const auto& e : fs::directory_iterator(outs[0])) {
      if (e.path().extension() != ".json") continue;
      ++compared;
      if (slurp(e.path()) == slurp(outs[1] / e.path().filename())) ++identical;
    }
  }
  fs::remove_all(root);
  return {compared > 0 && identical == compared,
          fmt("%d/%d JSON artifacts byte-identical across two runs", identical, compared)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"variational principle", variational_principle},
      {"action identity", action_identity},
      {"gradient vs finite differences", gradient},
      {"conservation on godel", conservation},
      {"shoot/connect round trip", round_trip},
      {"algebraic identities", identities},
      {"completeness probe on godel", completeness},
      {"disconnectedness family", disconnectedness},
      {"kerr_schild route and godel verdicts", kerr_route},
      {"CLI determinism", determinism},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", all.size());
    return 2;
  }
  bool all_pass = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
