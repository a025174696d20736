#include "config.hpp"

#include "ftc/errors.hpp"
#include "ftc/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <thread>

namespace ftc::app {

namespace {

// Keys accepted in config files and through --set; `params.*` is open-ended and is
// checked against the flow kind when the flow is built.
const std::set<std::string>& scalar_keys() {
  static const std::set<std::string> keys = {
      "flow.kind", "flow.bounds",
      "epoch.t0", "epoch.tau",
      "grid.nx", "grid.ny",
      "integrator.method", "integrator.step", "integrator.default_steps", "integrator.rel_tol",
      "integrator.abs_tol", "integrator.guard_factor",
      "jacobian.method", "jacobian.h",
      "probe.epsilon", "probe.n_dirs", "probe.n_probe", "probe.estimator", "probe.refine",
      "probe.max_along",
      "field.kernel", "field.max_invalid_fraction",
      "curves.quantile", "curves.theta_tol", "curves.families",
      "segment.n_seeds", "segment.threshold", "segment.transform", "segment.min_cells",
      "alpha.n_angles", "alpha.refine_evals", "alpha.occupancy_factor", "alpha.supersample",
      "alpha.max_escape_fraction",
      "output.payload", "output.scale", "output.slice_samples",
      "run.threads",
  };
  return keys;
}

const std::set<std::string>& list_keys() {
  static const std::set<std::string> keys = {"flow.term", "output.slice"};
  return keys;
}

}  // namespace

bool RunConfig::known_key(const std::string& key) {
  if (key.rfind("params.", 0) == 0) return key.size() > 7;
  return scalar_keys().count(key) || list_keys().count(key);
}

bool RunConfig::list_key(const std::string& key) { return list_keys().count(key) != 0; }

void RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  parse(in, path.string());
}

void RunConfig::parse(std::istream& in, const std::string& origin) {
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = origin + ":" + std::to_string(lineno);
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    const std::string key = section + "." + std::string(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    if (!known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (list_key(key))
      entries_[key].push_back(value);
    else
      entries_[key] = {value};
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown key '" + key + "'");
  entries_[key] = {value};
}

void RunConfig::set_list(const std::string& key, const std::vector<std::string>& values) {
  if (!known_key(key)) throw ConfigError("unknown key '" + key + "'");
  entries_[key] = values;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected section.key=value, got '" + assignment + "'");
  const std::string key(trim(std::string_view(assignment).substr(0, eq)));
  const std::string value(trim(std::string_view(assignment).substr(eq + 1)));
  if (list_key(key)) {
    if (!known_key(key)) throw ConfigError("unknown key '" + key + "'");
    entries_[key].push_back(value);
  } else {
    set(key, value);
  }
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() || it->second.empty() ? fallback : it->second.back();
}

double RunConfig::real(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_real(text(key, ""));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

long long RunConfig::integer(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_integer(text(key, ""));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_bool(text(key, ""));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::vector<std::string> RunConfig::list(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? std::vector<std::string>{} : it->second;
}

std::map<std::string, double> RunConfig::params() const {
  std::map<std::string, double> out;
  for (const auto& [k, v] : entries_)
    if (k.rfind("params.", 0) == 0) out[k.substr(7)] = real(k, 0.0);
  return out;
}

FlowSystem flow_from_config(const RunConfig& cfg) {
  const FlowKind kind = parse_flow_kind(cfg.text("flow.kind", "double_gyre"));
  std::vector<HamiltonianTerm> terms;
  for (const auto& t : cfg.list("flow.term")) terms.push_back(parse_term(t));
  if (!terms.empty() && kind != FlowKind::custom_hamiltonian)
    throw ConfigError("flow.term is only valid for custom_hamiltonian flows");
  FlowSystem flow = FlowSystem::from_params(kind, cfg.params(), std::move(terms));
  if (cfg.has("flow.bounds")) {
    std::vector<double> b;
    for (const auto& tok : split(cfg.text("flow.bounds", ""), ' '))
      if (!trim(tok).empty()) b.push_back(parse_real(trim(tok)));
    if (b.size() != 4) throw ConfigError("flow.bounds needs 4 numbers: x_min x_max y_min y_max");
    flow.with_bounds({b[0], b[1], b[2], b[3]});
  }
  return flow;
}

Epoch epoch_from_config(const RunConfig& cfg) {
  const Epoch e{cfg.real("epoch.t0", 0.0), cfg.real("epoch.tau", 15.0)};
  if (!std::isfinite(e.t0) || !std::isfinite(e.tau)) throw ConfigError("epoch values must be finite");
  return e;
}

GridSpec grid_from_config(const RunConfig& cfg, const FlowSystem& flow) {
  GridSpec g{static_cast<int>(cfg.integer("grid.nx", 256)), static_cast<int>(cfg.integer("grid.ny", 128)),
             flow.bounds()};
  g.validate();
  return g;
}

FieldSettings field_settings_from_config(const RunConfig& cfg) {
  FieldSettings s;
  auto& in = s.kernel.integrator;
  in.method = parse_integrator(cfg.text("integrator.method", "rk4"));
  in.step = cfg.real("integrator.step", 0.0);
  in.default_steps = static_cast<int>(cfg.integer("integrator.default_steps", in.default_steps));
  in.rel_tol = cfg.real("integrator.rel_tol", in.rel_tol);
  in.abs_tol = cfg.real("integrator.abs_tol", in.abs_tol);
  in.guard_factor = cfg.real("integrator.guard_factor", in.guard_factor);
  s.kernel.jacobian.method = parse_jacobian_method(cfg.text("jacobian.method", "finite_difference"));
  s.kernel.jacobian.h = cfg.real("jacobian.h", 0.0);
  auto& p = s.probe;
  p.epsilon = cfg.real("probe.epsilon", 0.0);
  p.n_dirs = static_cast<int>(cfg.integer("probe.n_dirs", p.n_dirs));
  p.n_probe = static_cast<int>(cfg.integer("probe.n_probe", p.n_probe));
  p.estimator = parse_estimator(cfg.text("probe.estimator", "auto"));
  p.refine = cfg.flag("probe.refine", false);
  p.max_along = cfg.flag("probe.max_along", false);
  s.max_invalid_fraction = cfg.real("field.max_invalid_fraction", s.max_invalid_fraction);
  s.threads = thread_count(cfg);
  return s;
}

GrowingSettings growing_from_config(const RunConfig& cfg) {
  GrowingSettings g;
  g.n_seeds = static_cast<int>(cfg.integer("segment.n_seeds", g.n_seeds));
  g.threshold = cfg.real("segment.threshold", g.threshold);
  const auto t = cfg.text("segment.transform", "log10");
  if (t == "log10")
    g.transform = ValueTransform::log10;
  else if (t == "none")
    g.transform = ValueTransform::none;
  else
    throw ConfigError("segment.transform must be log10 or none, got '" + t + "'");
  return g;
}

AlphaSettings alpha_from_config(const RunConfig& cfg) {
  AlphaSettings a;
  a.n_angles = static_cast<int>(cfg.integer("alpha.n_angles", a.n_angles));
  a.max_refine_evals = static_cast<int>(cfg.integer("alpha.refine_evals", a.max_refine_evals));
  a.advection.integrator = field_settings_from_config(cfg).kernel.integrator;
  a.advection.max_escape_fraction = cfg.real("alpha.max_escape_fraction", 0.01);
  a.advection.threads = thread_count(cfg);
  return a;
}

int thread_count(const RunConfig& cfg) {
  long long n = 0;
  if (cfg.has("run.threads")) {
    n = cfg.integer("run.threads", 1);
  } else if (const char* env = std::getenv("FTC_THREADS"); env && *env) {
    try {
      n = parse_integer(env);
    } catch (const ConfigError&) {
      throw ConfigError(std::string("FTC_THREADS must be an integer, got '") + env + "'");
    }
  } else {
    n = std::max(1u, std::thread::hardware_concurrency());
  }
  if (n < 1 || n > 4096) throw ConfigError("thread count must be in [1, 4096]");
  return static_cast<int>(n);
}

std::pair<Point2, Point2> parse_slice_line(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("slice must look like x0,y0:x1,y1, got '" + text + "'");
  return {parse_point(parts[0]), parse_point(parts[1])};
}

std::pair<int, int> parse_grid_size(const std::string& text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2) throw ConfigError("grid must look like NXxNY, got '" + text + "'");
  return {static_cast<int>(parse_integer(trim(parts[0]))), static_cast<int>(parse_integer(trim(parts[1])))};
}

Point2 parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("point must look like x,y, got '" + text + "'");
  return {parse_real(trim(parts[0])), parse_real(trim(parts[1]))};
}

}  // namespace ftc::app
