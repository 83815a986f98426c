#pragma once

// Serialisation of results: JSON with doubles printed at 17 significant
// digits (non-finite values become null), CSV tables, and atomic file
// writes through a temporary file and rename.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "godel/connect.hpp"
#include "godel/hypotheses.hpp"
#include "godel/shoot.hpp"
#include "godel/spacetime.hpp"

namespace godel {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_string(const std::string& s, std::string& out) {
  out += Json(s).dump();  // library escaping
}

inline void dump(const Json& j, int indent, int level, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_string(it.key(), out);
        out += ": ";
        dump(it.value(), indent, level + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], indent, level + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], indent, level + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::string:
      dump_string(j.get<std::string>(), out);
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string to_json_text(const Json& j, int indent = 2) {
  std::string out;
  detail::dump(j, indent, 0, out);
  out += "\n";
  return out;
}

/// Writes through "<path>.tmp" and renames, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ",";
        out += std::isfinite(r[i]) ? format_double(r[i]) : "nan";
      }
      out += "\n";
    }
    return out;
  }
};

inline Json point_json(std::span<const double> x) {
  Json a = Json::array();
  for (double v : x) a.push_back(v);
  return a;
}

inline Json spec_json(const SpacetimeSpec& s) {
  Json j;
  j["family"] = s.family;
  j["dim"] = s.dim;
  j["A"] = to_string(s.A);
  j["B"] = to_string(s.B);
  j["C"] = to_string(s.C);
  Json params = Json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  j["params"] = params;
  Json src = Json::object();
  for (const auto& [k, v] : s.sources) src[k] = v;
  j["sources"] = src;
  j["base_metric"] = s.euclidean_base() ? Json("euclidean") : Json("custom");
  return j;
}

inline Json witness_json(const GrowthWitness& w) {
  return Json{{"lambda", w.lambda}, {"k", w.k}, {"x0", point_json(w.x0)}};
}

inline Json report_json(const HypothesisReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["verdict"] = to_string(r.verdict);
  j["witness"] = r.witness ? witness_json(*r.witness) : Json(nullptr);
  Json vals = Json::object();
  for (const auto& [k, v] : r.values) vals[k] = v;
  j["values"] = vals;
  j["worst_point"] = r.worst_point.empty() ? Json(nullptr) : point_json(r.worst_point);
  j["margin"] = r.margin;
  j["counterexample"] = r.counterexample ? point_json(*r.counterexample) : Json(nullptr);
  Json shells = Json::array();
  for (const ShellStat& s : r.shells)
    shells.push_back(Json{{"radius", s.radius},
                          {"max_field", s.max_field},
                          {"growth_ratio", s.growth_ratio},
                          {"margin", s.margin},
                          {"worst_point", point_json(s.worst_point)},
                          {"violations", s.violations}});
  j["shells"] = shells;
  j["detail"] = r.detail;
  j["caveat"] = r.caveat;
  return j;
}

inline Json summary_json(const TheoremSummary& t) {
  Json j;
  j["summary"] = t.summary;
  j["connectedness"] = to_string(t.connectedness);
  j["passing_routes"] = t.passing_routes;
  Json routes = Json::array();
  for (const RouteResult& r : t.routes) {
    Json rr;
    rr["route"] = r.route;
    rr["applicable"] = r.applicable;
    rr["verdict"] = r.applicable ? Json(to_string(r.verdict)) : Json("NOT_APPLICABLE");
    rr["note"] = r.note;
    Json reps = Json::array();
    for (const HypothesisReport& h : r.reports) reps.push_back(report_json(h));
    rr["reports"] = reps;
    routes.push_back(rr);
  }
  j["routes"] = routes;
  j["completeness"] = report_json(t.completeness);
  j["caveat"] = kSamplingCaveat;
  return j;
}

inline Json solution_json(const GeodesicSolution& s) {
  Json j;
  j["J"] = s.action_J;
  j["f"] = s.action_f;
  j["identity_defect"] = std::abs(2.0 * s.action_J - s.action_f);
  j["quadrature_tolerance"] = s.quadrature_tolerance;
  j["residual"] = s.residual;
  j["grad_norm"] = s.grad_norm;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["degenerate"] = s.degenerate;
  j["restart_used"] = s.restart_used;
  j["segments"] = s.path.segments();
  Json rs = Json::array();
  for (const RestartRecord& r : s.restarts)
    rs.push_back(Json{{"index", r.index},
                      {"converged", r.converged},
                      {"degenerate", r.degenerate},
                      {"iterations", r.iterations},
                      {"J", r.J},
                      {"grad_norm", r.grad_norm},
                      {"note", r.note}});
  j["restarts"] = rs;
  j["message"] = s.message;
  return j;
}

/// Columns s, x1..xd, y, t.
inline CsvTable solution_csv(const GeodesicSolution& s) {
  CsvTable t;
  const int d = s.path.dim();
  t.header.push_back("s");
  for (int k = 1; k <= d; ++k) t.header.push_back("x" + std::to_string(k));
  t.header.push_back("y");
  t.header.push_back("t");
  if (s.y_curve.empty()) return t;
  const int n = s.path.segments();
  for (int i = 0; i <= n; ++i) {
    std::vector<double> row{static_cast<double>(i) / n};
    for (double v : s.path.node(i)) row.push_back(v);
    row.push_back(s.y_curve[static_cast<std::size_t>(i)]);
    row.push_back(s.t_curve[static_cast<std::size_t>(i)]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct DriftSummary {
  double c1 = 0.0, c2 = 0.0, Ez = 0.0;
};

inline DriftSummary max_drift(const Trajectory& tr) {
  DriftSummary d;
  for (const TrajectorySample& s : tr.samples) {
    d.c1 = std::max(d.c1, std::abs(s.c1_drift));
    d.c2 = std::max(d.c2, std::abs(s.c2_drift));
    d.Ez = std::max(d.Ez, std::abs(s.Ez_drift));
  }
  return d;
}

inline Json trajectory_json(const Trajectory& tr) {
  const DriftSummary d = max_drift(tr);
  Json j;
  j["c1"] = tr.initial.c1;
  j["c2"] = tr.initial.c2;
  j["Ez"] = tr.initial.Ez;
  j["drift"] = Json{{"c1", d.c1}, {"c2", d.c2}, {"Ez", d.Ez}};
  j["termination"] = to_string(tr.termination);
  j["s_end"] = tr.s_end;
  j["steps"] = tr.steps;
  j["samples"] = tr.samples.size();
  if (!tr.samples.empty()) {
    const TrajectorySample& b = tr.samples.back();
    j["final"] = Json{{"x", point_json(b.x)}, {"xdot", point_json(b.xdot)}, {"y", b.y},
                      {"t", b.t},          {"length", b.length}};
  }
  j["message"] = tr.message;
  return j;
}

/// Columns s, x1..xd, y, t, ydot, tdot, c1_drift, c2_drift, Ez_drift.
inline CsvTable trajectory_csv(const Trajectory& tr, int dim) {
  CsvTable t;
  t.header.push_back("s");
  for (int k = 1; k <= dim; ++k) t.header.push_back("x" + std::to_string(k));
  for (const char* c : {"y", "t", "ydot", "tdot", "c1_drift", "c2_drift", "Ez_drift"})
    t.header.push_back(c);
  for (const TrajectorySample& s : tr.samples) {
    std::vector<double> row{s.s};
    row.insert(row.end(), s.x.begin(), s.x.end());
    for (double v : {s.y, s.t, s.ydot, s.tdot, s.c1_drift, s.c2_drift, s.Ez_drift}) row.push_back(v);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Json probe_json(const ProbeReport& p, const GrowthWitness& w) {
  Json j;
  j["witness"] = witness_json(w);
  j["lambda_bar"] = p.lambda_bar;
  j["k_bar"] = p.k_bar;
  j["c_norm2"] = p.c_norm2;
  j["Ez"] = p.Ez;
  j["witness_held"] = p.witness_violations == 0;
  j["witness_violations"] = p.witness_violations;
  j["speed_bound_held"] = p.speed_bound_holds;
  j["max_speed_excess"] = p.max_speed_excess;
  j["log_bound_held"] = p.bound_holds;
  j["max_log_excess"] = p.max_excess;
  j["blow_up"] = p.trajectory.termination == Termination::BlowUp;
  j["trajectory"] = trajectory_json(p.trajectory);
  const bool pass = p.witness_violations == 0 && p.bound_holds &&
                    p.trajectory.termination == Termination::Completed &&
                    p.speed_bound_holds;
  j["verdict"] = p.witness_violations > 0 ? "HYPOTHESIS_FAILED" : pass ? "PASS" : "FAIL";
  return j;
}

}  // namespace godel
