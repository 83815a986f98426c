#pragma once

// Batch front end: one command per invocation, artifacts written atomically
// after the computation succeeds, exit codes
//   0 success (checkers always, whatever the verdict)
//   2 validation error
//   3 degenerate L in every restart (connect)
//   4 nonconvergence (connect)

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "godel/config.hpp"
#include "godel/connect.hpp"
#include "godel/hypotheses.hpp"
#include "godel/report.hpp"
#include "godel/shoot.hpp"
#include "godel/spacetime.hpp"

namespace godel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitNonconvergence = 4;

struct CliOptions {
  std::string command;
  std::string config;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> segments;
  std::optional<double> smax;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string status = "ok";
  std::vector<Artifact> artifacts;
  // key outcomes for sweep summaries
  double J = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string verdict;
  std::string message;
};

namespace detail {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"describe", "connect", "shoot", "probe", "check", "sweep"};
  return names;
}

inline void apply_overrides(Json& command, const std::string& name, const CliOptions& o) {
  if (o.seed) {
    if (name == "connect") command["seed"] = *o.seed;
    if (name == "check") command["region"]["seed"] = *o.seed;
  }
  if (o.segments && name == "connect") command["segments"] = *o.segments;
  if (o.smax && (name == "shoot" || name == "probe")) command["s_max"] = *o.smax;
}

inline CommandResult run_describe(const SpacetimeSpec& spec, const Json& st_block) {
  Json j;
  j["command"] = "describe";
  j["spacetime"] = spec_json(spec);
  std::vector<Point> pts;
  if (const Json* v = cfg::find(st_block, "validate_points"))
    for (std::size_t i = 0; i < v->size(); ++i) {
      Json wrap{{"p", (*v)[i]}};
      pts.push_back(cfg::vec(wrap, "spacetime.validate_points", "p", spec.dim));
    }
  if (pts.empty()) pts.push_back(Point(static_cast<std::size_t>(spec.dim), 0.0));
  Json arr = Json::array();
  for (const Point& x : pts) {
    const CoefficientSample s = sample_coefficients(spec, x);
    const SpectralData sp = spectral(s);
    arr.push_back(Json{{"x", point_json(x)},
                       {"A", s.A},
                       {"B", s.B},
                       {"C", s.C},
                       {"H", s.H},
                       {"Lambda_plus", sp.lambda_plus},
                       {"Lambda_minus", sp.lambda_minus},
                       {"mu", sp.mu}});
  }
  j["points"] = arr;
  CommandResult r;
  r.artifacts.push_back({"describe.json", to_json_text(j)});
  r.message = "described " + spec.family;
  return r;
}

inline CommandResult run_connect(const SpacetimeSpec& spec, const Json& cmd) {
  const std::string pre = "command";
  const Endpoints ep = parse_endpoints(cmd, pre, spec.dim);
  const SolverConfig sc = parse_solver(cmd, pre);
  const GeodesicSolution sol = minimize_action(spec, ep, sc);
  Json j;
  j["command"] = "connect";
  j["spacetime"] = spec_json(spec);
  j["endpoints"] = Json{{"x_p", point_json(ep.x_p)}, {"x_q", point_json(ep.x_q)}, {"y_p", ep.y_p},
                        {"t_p", ep.t_p},             {"y_q", ep.y_q},             {"t_q", ep.t_q}};
  j["solution"] = solution_json(sol);
  CommandResult r;
  r.J = sol.action_J;
  r.residual = sol.residual;
  r.artifacts.push_back({"connect.json", to_json_text(j)});
  r.artifacts.push_back({"connect.csv", solution_csv(sol).str()});
  if (sol.degenerate) {
    r.exit_code = kExitDegenerate;
    r.status = "degenerate";
  } else if (!sol.converged) {
    r.exit_code = kExitNonconvergence;
    r.status = "not_converged";
  }
  r.message = sol.message;
  return r;
}

inline double parse_smax(const Json& cmd) {
  const double s = cfg::number(cmd, "command", "s_max", 10.0);
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("command.s_max", "must be finite and >= 0");
  return s;
}

inline CommandResult run_shoot(const SpacetimeSpec& spec, const Json& cmd) {
  const InitialData in = parse_initial(cmd, "command", spec.dim);
  const StepControl ctl = parse_step(cmd, "command");
  const double s_max = parse_smax(cmd);
  try {
    sample_coefficients(spec, in.x);
  } catch (const Error& e) {
    throw ConfigError("command.x", e.what());
  }
  const Trajectory tr = integrate_geodesic(spec, in, s_max, ctl);
  Json j;
  j["command"] = "shoot";
  j["spacetime"] = spec_json(spec);
  j["s_max"] = s_max;
  j["trajectory"] = trajectory_json(tr);
  CommandResult r;
  r.artifacts.push_back({"shoot.json", to_json_text(j)});
  r.artifacts.push_back({"shoot.csv", trajectory_csv(tr, spec.dim).str()});
  r.status = to_string(tr.termination);
  r.message = tr.message;
  return r;
}

inline CommandResult run_probe(const SpacetimeSpec& spec, const Json& cmd) {
  const InitialData in = parse_initial(cmd, "command", spec.dim);
  const StepControl ctl = parse_step(cmd, "command");
  const double s_max = parse_smax(cmd);
  const GrowthWitness w = parse_witness(cmd, "command", "witness", spec.dim,
                                        {0.0, 1.0, Point(static_cast<std::size_t>(spec.dim), 0.0)});
  try {
    sample_coefficients(spec, in.x);
  } catch (const Error& e) {
    throw ConfigError("command.x", e.what());
  }
  const ProbeReport rep = completeness_probe(spec, in, w, s_max, ctl);
  Json j;
  j["command"] = "probe";
  j["spacetime"] = spec_json(spec);
  j["s_max"] = s_max;
  j["probe"] = probe_json(rep, w);
  CommandResult r;
  r.verdict = j["probe"]["verdict"].get<std::string>();
  r.artifacts.push_back({"probe.json", to_json_text(j)});
  r.artifacts.push_back({"probe.csv", trajectory_csv(rep.trajectory, spec.dim).str()});
  r.status = to_string(rep.trajectory.termination);
  r.message = "probe " + r.verdict;
  return r;
}

inline CommandResult run_check(const SpacetimeSpec& spec, const Json& cmd) {
  const std::string pre = "command";
  const int d = spec.dim;
  const Region region = parse_region(cmd, pre, d);
  const GrowthWitness def{0.0, 1.0, region.center};
  const std::string cond = cfg::string(cmd, pre, "condition", "theorems");
  Json j;
  j["command"] = "check";
  j["spacetime"] = spec_json(spec);
  j["condition"] = cond;
  j["region"] = Json{{"center", point_json(region.center)},
                     {"radii", region.radii},
                     {"samples_per_shell", region.samples_per_shell},
                     {"seed", region.seed}};
  CommandResult r;
  auto single = [&](const HypothesisReport& rep) {
    j["report"] = report_json(rep);
    r.verdict = to_string(rep.verdict);
  };
  if (cond == "growth") {
    const std::string text = cfg::string(cmd, pre, "field");
    ParseOptions opts;
    opts.constants = spec.params;
    ExprAst field;
    try {
      field = parse_expression(text, d, opts);
    } catch (const ParseError& e) {
      throw ConfigError("command.field", e.what());
    }
    const double exponent = cfg::number(cmd, pre, "exponent", 2.0);
    if (!(exponent > 0.0)) throw ConfigError("command.exponent", "must be positive");
    ScalarField f = [&field](std::span<const double> x) { return evaluate(field, x); };
    GrowthWitness w = parse_witness(cmd, pre, "witness", d, def);
    if (cfg::boolean(cmd, pre, "fit_witness", false)) {
      w = fit_growth_witness(f, region, d, exponent);
      j["fitted_witness"] = witness_json(w);
    }
    single(check_growth("growth", f, region, d, w, exponent));
  } else if (cond == "h2") {
    single(check_h2(spec, region));
  } else if (cond == "h3") {
    single(check_h3(spec, region, parse_witness(cmd, pre, "witness", d, def)));
  } else if (cond == "h3prime") {
    single(check_h3prime(spec, region, parse_witness(cmd, pre, "witness", d, def)));
  } else if (cond == "s2") {
    try {
      single(check_s2(spec, region, parse_witness(cmd, pre, "witness", d, def),
                      parse_witness(cmd, pre, "witness2", d, {0.0, 0.0, region.center})));
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError("spacetime", e.what());
    }
  } else if (cond == "c2") {
    single(check_c2(spec, region, parse_witness(cmd, pre, "witness", d, def)));
  } else if (cond == "L_negative") {
    single(check_L_negative(spec, region));
  } else if (cond == "theorems") {
    VerdictWitnesses w;
    w.growth = parse_witness(cmd, pre, "witness", d, def);
    w.linear = parse_witness(cmd, pre, "witness_linear", d, {0.0, 0.0, region.center});
    w.completeness = parse_witness(cmd, pre, "witness_completeness", d, def);
    const TheoremSummary t = theorem_verdicts(spec, region, w);
    j["theorems"] = summary_json(t);
    r.verdict = to_string(t.connectedness);
  } else {
    throw ConfigError("command.condition", "unknown condition '" + cond + "'");
  }
  r.artifacts.push_back({"check.json", to_json_text(j)});
  r.message = cond + " " + r.verdict;
  return r;
}

inline void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& arts) {
  for (const Artifact& a : arts) write_atomic(dir / a.name, a.content);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string json_scalar_text(const Json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace detail

inline CommandResult execute(const Json& config, const CliOptions& opts,
                             const std::filesystem::path& out_dir, bool allow_sweep = true);

namespace detail {

inline CommandResult run_sweep(const Json& config, const CliOptions& opts,
                               const std::filesystem::path& out_dir) {
  const Json& cmd = config["command"];
  const Json& grid = cfg::object(cmd, "command", "grid");
  const Json& cell = cfg::object(cmd, "command", "cell");
  std::vector<std::string> keys;
  std::vector<std::vector<Json>> values;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array()) throw ConfigError("command.grid." + it.key(), "expected an array");
    keys.push_back(it.key());
    values.emplace_back(it.value().begin(), it.value().end());
  }
  std::size_t cells = keys.empty() ? 0 : 1;
  for (const auto& v : values) cells *= v.size();

  // resolve every cell config up front so bad keys fail before any work
  std::vector<Json> cell_configs;
  std::vector<std::vector<Json>> cell_values;
  for (std::size_t c = 0; c < cells; ++c) {
    Json cc = config;
    cc["command"] = cell;
    std::vector<Json> chosen;
    std::size_t rem = c;
    for (std::size_t k = keys.size(); k-- > 0;) {
      chosen.insert(chosen.begin(), values[k][rem % values[k].size()]);
      rem /= values[k].size();
    }
    for (std::size_t k = 0; k < keys.size(); ++k) set_config_value(cc, keys[k], chosen[k]);
    cell_configs.push_back(std::move(cc));
    cell_values.push_back(std::move(chosen));
  }

  CliOptions cell_opts = opts;
  cell_opts.command.clear();
  std::vector<CommandResult> results(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      char name[32];
      std::snprintf(name, sizeof name, "cell_%04zu", c);
      try {
        results[c] = execute(cell_configs[c], cell_opts, out_dir / name, false);
      } catch (const Error& e) {
        results[c].exit_code = kExitValidation;
        results[c].status = "error";
        results[c].message = e.what();
      } catch (const std::exception& e) {
        results[c].exit_code = kExitValidation;
        results[c].status = "error";
        results[c].message = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(std::max<std::size_t>(cells, 1))));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::string csv = "cell";
  for (const auto& k : keys) csv += "," + csv_field(k);
  csv += ",command,exit_code,status,J,residual,verdict\n";
  Json rows = Json::array();
  const std::string cell_cmd = cfg::string(cell, "command.cell", "name", "");
  for (std::size_t c = 0; c < cells; ++c) {
    const CommandResult& r = results[c];
    csv += std::to_string(c);
    Json params = Json::object();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      csv += "," + csv_field(json_scalar_text(cell_values[c][k]));
      params[keys[k]] = cell_values[c][k];
    }
    csv += "," + cell_cmd + "," + std::to_string(r.exit_code) + "," + csv_field(r.status) + "," +
           (std::isfinite(r.J) ? format_double(r.J) : "") + "," +
           (std::isfinite(r.residual) ? format_double(r.residual) : "") + "," + r.verdict + "\n";
    rows.push_back(Json{{"cell", c},
                        {"params", params},
                        {"command", cell_cmd},
                        {"exit_code", r.exit_code},
                        {"status", r.status},
                        {"J", r.J},
                        {"residual", r.residual},
                        {"verdict", r.verdict},
                        {"message", r.message}});
  }
  Json j;
  j["command"] = "sweep";
  j["grid"] = grid;
  j["cells"] = rows;
  CommandResult out;
  out.artifacts.push_back({"summary.csv", csv});
  out.artifacts.push_back({"sweep.json", to_json_text(j)});
  out.message = "sweep of " + std::to_string(cells) + " cells";
  return out;
}

}  // namespace detail

/// Runs one command from a parsed config and writes its artifacts into
/// out_dir. Validation problems throw ConfigError (or another Error).
inline CommandResult execute(const Json& config, const CliOptions& opts,
                             const std::filesystem::path& out_dir, bool allow_sweep) {
  if (!config.is_object()) throw ConfigError("<root>", "expected a JSON object");
  Json cfgj = config;
  const Json empty = Json::object();
  if (!cfgj.contains("command")) cfgj["command"] = Json::object();
  Json& cmd = cfgj["command"];
  if (!cmd.is_object()) throw ConfigError("command", "expected an object");
  std::string name = cfg::string(cmd, "command", "name", opts.command);
  if (!opts.command.empty() && name != opts.command)
    throw ConfigError("command.name", "config names '" + name + "' but the command line asks for '" +
                                          opts.command + "'");
  if (name.empty()) throw ConfigError("command.name", "no command given");
  const auto& names = detail::command_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("command.name", "unknown command '" + name + "'");

  CommandResult r;
  if (name == "sweep") {
    if (!allow_sweep) throw ConfigError("command.name", "sweeps cannot be nested");
    r = detail::run_sweep(cfgj, opts, out_dir);
  } else {
    detail::apply_overrides(cmd, name, opts);
    if (!cfgj.contains("spacetime")) throw ConfigError("spacetime", "missing required object");
    const SpacetimeSpec spec = build_spacetime(cfgj["spacetime"]);
    if (name == "describe") r = detail::run_describe(spec, cfgj["spacetime"]);
    else if (name == "connect") r = detail::run_connect(spec, cmd);
    else if (name == "shoot") r = detail::run_shoot(spec, cmd);
    else if (name == "probe") r = detail::run_probe(spec, cmd);
    else r = detail::run_check(spec, cmd);
  }
  detail::write_artifacts(out_dir, r.artifacts);
  return r;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Geodesics of Goedel-type spacetimes"};
  CliOptions o;
  std::uint64_t seed = 0;
  int segments = 0;
  double smax = 0.0;
  app.add_option("command", o.command, "describe | connect | shoot | probe | check | sweep");
  app.add_option("--config", o.config, "run configuration (JSON)")->required();
  app.add_option("--out", o.out_dir, "output directory (overrides output.dir)");
  app.add_option("--jobs", o.jobs, "parallel sweep cells")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "seed for restarts and sampling");
  auto* seg_opt = app.add_option("--segments", segments, "path segments for connect")
                      ->check(CLI::Range(2, 1 << 20));
  auto* smax_opt = app.add_option("--smax", smax, "integration length for shoot and probe");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (*seed_opt) o.seed = seed;
  if (*seg_opt) o.segments = segments;
  if (*smax_opt) o.smax = smax;

  try {
    const Json config = load_config_file(o.config);
    std::filesystem::path dir = o.out_dir;
    if (dir.empty()) {
      const Json* outb = cfg::find(config, "output");
      dir = outb ? cfg::string(*outb, "output", "dir", "out") : std::string("out");
    }
    dir = std::filesystem::absolute(dir);
    const CommandResult r = execute(config, o, dir);
    out << r.message << "\n";
    if (r.exit_code != kExitOk) err << "status: " << r.status << "\n";
    return r.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: output: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace godel
