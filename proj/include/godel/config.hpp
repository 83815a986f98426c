#pragma once

// JSON run configuration: spacetime block, command block, output block.
// Every accessor names the offending key in its error message.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "godel/connect.hpp"
#include "godel/hypotheses.hpp"
#include "godel/report.hpp"
#include "godel/shoot.hpp"
#include "godel/spacetime.hpp"

namespace godel {

class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : InvalidArgument("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

inline Json load_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
}

namespace cfg {

inline std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline const Json* find(const Json& block, const std::string& key) {
  if (!block.is_object()) return nullptr;
  auto it = block.find(key);
  return it == block.end() ? nullptr : &*it;
}

inline double number(const Json& block, const std::string& prefix, const std::string& key,
                     std::optional<double> fallback = std::nullopt) {
  const Json* v = find(block, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(prefix, key), "missing required number");
  }
  if (!v->is_number()) throw ConfigError(join(prefix, key), "expected a number");
  return v->get<double>();
}

inline long integer(const Json& block, const std::string& prefix, const std::string& key,
                    std::optional<long> fallback = std::nullopt) {
  const Json* v = find(block, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(prefix, key), "missing required integer");
  }
  if (v->is_number_integer()) return v->get<long>();
  if (v->is_number_float()) {
    const double d = v->get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15) return static_cast<long>(d);
  }
  throw ConfigError(join(prefix, key), "expected an integer");
}

inline bool boolean(const Json& block, const std::string& prefix, const std::string& key,
                    bool fallback) {
  const Json* v = find(block, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(join(prefix, key), "expected true or false");
  return v->get<bool>();
}

inline std::string string(const Json& block, const std::string& prefix, const std::string& key,
                          std::optional<std::string> fallback = std::nullopt) {
  const Json* v = find(block, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(prefix, key), "missing required string");
  }
  if (!v->is_string()) throw ConfigError(join(prefix, key), "expected a string");
  return v->get<std::string>();
}

inline Point vec(const Json& block, const std::string& prefix, const std::string& key, int dim,
                 std::optional<Point> fallback = std::nullopt) {
  const Json* v = find(block, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(prefix, key), "missing required array");
  }
  if (!v->is_array()) throw ConfigError(join(prefix, key), "expected an array of numbers");
  Point out;
  for (const auto& e : *v) {
    if (!e.is_number()) throw ConfigError(join(prefix, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  if (dim > 0 && out.size() != static_cast<std::size_t>(dim))
    throw ConfigError(join(prefix, key), "expected " + std::to_string(dim) + " entries, got " +
                                             std::to_string(out.size()));
  return out;
}

inline const Json& object(const Json& block, const std::string& prefix, const std::string& key) {
  const Json* v = find(block, key);
  if (!v) throw ConfigError(join(prefix, key), "missing required object");
  if (!v->is_object()) throw ConfigError(join(prefix, key), "expected an object");
  return *v;
}

}  // namespace cfg

/// Builds the spacetime from {"family", "params", "fields", "dim",
/// "base_metric", "validate_points"} and checks H > 0 at each validation
/// point (the origin when none are given).
inline SpacetimeSpec build_spacetime(const Json& block) {
  const std::string pre = "spacetime";
  if (!block.is_object()) throw ConfigError(pre, "expected an object");
  BuiltinParams bp;
  const std::string family = cfg::string(block, pre, "family", "custom");
  if (const Json* p = cfg::find(block, "params")) {
    if (!p->is_object()) throw ConfigError(pre + ".params", "expected an object");
    for (auto it = p->begin(); it != p->end(); ++it) {
      if (!it.value().is_number()) throw ConfigError(pre + ".params." + it.key(), "expected a number");
      bp.reals[it.key()] = it.value().get<double>();
    }
  }
  if (const Json* f = cfg::find(block, "fields")) {
    if (!f->is_object()) throw ConfigError(pre + ".fields", "expected an object");
    for (auto it = f->begin(); it != f->end(); ++it) {
      if (!it.value().is_string())
        throw ConfigError(pre + ".fields." + it.key(), "expected an expression string");
      bp.fields[it.key()] = it.value().get<std::string>();
    }
  }
  if (cfg::find(block, "dim")) {
    const long d = cfg::integer(block, pre, "dim");
    if (d < 1 || d > kMaxDim) throw ConfigError(pre + ".dim", "must be in [1, 8]");
    bp.dim = static_cast<int>(d);
  }
  SpacetimeSpec spec;
  try {
    spec = instantiate_builtin(family, bp);
  } catch (const InvalidArgument& e) {
    throw ConfigError(pre, e.what());
  }
  if (const Json* m = cfg::find(block, "base_metric")) {
    if (!m->is_array()) throw ConfigError(pre + ".base_metric", "expected an array of strings");
    std::vector<std::string> entries;
    for (const auto& e : *m) {
      if (!e.is_string()) throw ConfigError(pre + ".base_metric", "expected an array of strings");
      entries.push_back(e.get<std::string>());
    }
    try {
      set_base_metric(spec, entries);
    } catch (const InvalidArgument& e) {
      throw ConfigError(pre + ".base_metric", e.what());
    }
  }
  std::vector<Point> checks;
  if (const Json* v = cfg::find(block, "validate_points")) {
    if (!v->is_array()) throw ConfigError(pre + ".validate_points", "expected an array of points");
    for (std::size_t i = 0; i < v->size(); ++i) {
      Json wrap{{"p", (*v)[i]}};
      checks.push_back(cfg::vec(wrap, pre + ".validate_points[" + std::to_string(i) + "]", "p", spec.dim));
    }
  } else {
    checks.push_back(Point(static_cast<std::size_t>(spec.dim), 0.0));
  }
  for (const Point& x : checks) {
    try {
      sample_coefficients(spec, x);
      if (!spec.euclidean_base()) sample_base_metric(spec, x);
    } catch (const Error& e) {
      throw ConfigError(pre + ".validate_points", e.what());
    }
  }
  return spec;
}

inline SolverConfig parse_solver(const Json& b, const std::string& pre) {
  SolverConfig c;
  c.segments = static_cast<int>(cfg::integer(b, pre, "segments", c.segments));
  c.max_iters = static_cast<int>(cfg::integer(b, pre, "max_iters", c.max_iters));
  c.grad_tol = cfg::number(b, pre, "grad_tol", c.grad_tol);
  c.restarts = static_cast<int>(cfg::integer(b, pre, "restarts", c.restarts));
  c.shrink = cfg::number(b, pre, "shrink", c.shrink);
  c.sufficient_decrease = cfg::number(b, pre, "sufficient_decrease", c.sufficient_decrease);
  c.ell_floor = cfg::number(b, pre, "ell_floor", c.ell_floor);
  c.perturbation = cfg::number(b, pre, "perturbation", c.perturbation);
  c.seed = static_cast<std::uint64_t>(cfg::integer(b, pre, "seed", 0));
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(pre, e.what());
  }
  return c;
}

inline StepControl parse_step(const Json& b, const std::string& pre) {
  StepControl s;
  const Json* blk = cfg::find(b, "step");
  if (!blk) return s;
  const std::string p = pre + ".step";
  s.h = cfg::number(*blk, p, "h", s.h);
  s.adaptive = cfg::boolean(*blk, p, "adaptive", s.adaptive);
  s.tol = cfg::number(*blk, p, "tol", s.tol);
  s.h_min = cfg::number(*blk, p, "h_min", s.h_min);
  s.h_max = cfg::number(*blk, p, "h_max", s.h_max);
  s.blowup = cfg::number(*blk, p, "blowup", s.blowup);
  s.max_steps = cfg::integer(*blk, p, "max_steps", s.max_steps);
  s.record_stride = static_cast<int>(cfg::integer(*blk, p, "record_stride", s.record_stride));
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(p, e.what());
  }
  return s;
}

inline InitialData parse_initial(const Json& b, const std::string& pre, int dim) {
  InitialData in;
  in.x = cfg::vec(b, pre, "x", dim);
  in.xdot = cfg::vec(b, pre, "xdot", dim);
  in.y = cfg::number(b, pre, "y", 0.0);
  in.t = cfg::number(b, pre, "t", 0.0);
  in.ydot = cfg::number(b, pre, "ydot", 0.0);
  in.tdot = cfg::number(b, pre, "tdot", 0.0);
  return in;
}

inline Endpoints parse_endpoints(const Json& b, const std::string& pre, int dim) {
  Endpoints e;
  e.x_p = cfg::vec(b, pre, "x_p", dim);
  e.x_q = cfg::vec(b, pre, "x_q", dim);
  e.y_p = cfg::number(b, pre, "y_p", 0.0);
  e.t_p = cfg::number(b, pre, "t_p", 0.0);
  e.y_q = cfg::number(b, pre, "y_q", 0.0);
  e.t_q = cfg::number(b, pre, "t_q", 0.0);
  return e;
}

/// {"lambda", "k", "x0"}; x0 defaults to the origin.
inline GrowthWitness parse_witness(const Json& b, const std::string& prefix, const std::string& key,
                                   int dim, GrowthWitness fallback) {
  const Json* w = cfg::find(b, key);
  if (!w) return fallback;
  const std::string pre = cfg::join(prefix, key);
  if (!w->is_object()) throw ConfigError(pre, "expected an object");
  GrowthWitness out;
  out.lambda = cfg::number(*w, pre, "lambda", fallback.lambda);
  out.k = cfg::number(*w, pre, "k", fallback.k);
  out.x0 = cfg::vec(*w, pre, "x0", dim, fallback.x0);
  if (!(out.lambda >= 0.0)) throw ConfigError(pre + ".lambda", "must be >= 0");
  return out;
}

/// {"center", "radii"} or {"center", "r_min", "r_max", "ratio"}, plus
/// "samples_per_shell" and "seed".
inline Region parse_region(const Json& b, const std::string& pre, int dim) {
  Region r;
  const Json* blk = cfg::find(b, "region");
  const Json empty = Json::object();
  const Json& g = blk ? *blk : empty;
  const std::string p = pre + ".region";
  r.center = cfg::vec(g, p, "center", dim, Point(static_cast<std::size_t>(dim), 0.0));
  r.samples_per_shell = static_cast<int>(cfg::integer(g, p, "samples_per_shell", 32));
  r.seed = static_cast<std::uint64_t>(cfg::integer(g, p, "seed", 0));
  if (cfg::find(g, "radii")) {
    r.radii = cfg::vec(g, p, "radii", 0);
  } else {
    const double r_min = cfg::number(g, p, "r_min", 0.01);
    const double r_max = cfg::number(g, p, "r_max", 1e4);
    const double ratio = cfg::number(g, p, "ratio", 10.0);
    if (!(r_min > 0.0 && r_max >= r_min)) throw ConfigError(p, "need 0 < r_min <= r_max");
    if (!(ratio > 1.0)) throw ConfigError(p + ".ratio", "must exceed 1");
    r.radii = Region::geometric(r.center, r_min, r_max, ratio, r.samples_per_shell, r.seed).radii;
  }
  try {
    r.validate(dim);
  } catch (const InvalidArgument& e) {
    throw ConfigError(p, e.what());
  }
  return r;
}

/// Sets a dotted key path in a config; a bare name addresses
/// spacetime.params.<name>.
inline void set_config_value(Json& root, const std::string& key, const Json& value) {
  std::vector<std::string> parts;
  if (key.find('.') == std::string::npos) {
    parts = {"spacetime", "params", key};
  } else {
    std::string cur;
    for (char ch : key) {
      if (ch == '.') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
  }
  Json* node = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError(key, "path crosses a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = Json::object();
  }
  if (!node->is_object()) throw ConfigError(key, "path crosses a non-object");
  (*node)[parts.back()] = value;
}

}  // namespace godel
