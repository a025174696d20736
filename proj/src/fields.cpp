#include "ftc/fields.hpp"

#include "ftc/errors.hpp"
#include "ftc/text.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace ftc {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw ConfigError("grid needs nx >= 2 and ny >= 2");
  if (!bounds.valid()) throw ConfigError("grid bounds must satisfy x_min < x_max, y_min < y_max");
}

FieldGrid::FieldGrid(const GridSpec& spec, double fill)
    : spec_(spec), values_(spec.size(), fill), valid_(spec.size(), 1) {
  spec.validate();
}

void FieldGrid::set_invalid(std::size_t k) {
  values_[k] = std::numeric_limits<double>::quiet_NaN();
  valid_[k] = 0;
}

void FieldGrid::set(std::size_t k, double v) {
  if (!std::isfinite(v)) {
    set_invalid(k);
    return;
  }
  values_[k] = v;
  valid_[k] = 1;
}

std::size_t FieldGrid::invalid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{0}));
}

namespace {

struct KernelName {
  FieldKernel kernel;
  std::string_view name;
};

constexpr KernelName kKernelNames[] = {
    {FieldKernel::ftle, "ftle"},           {FieldKernel::maxftc, "maxftc"},
    {FieldKernel::minftc, "minftc"},       {FieldKernel::ftc_ratio, "ftc_ratio"},
    {FieldKernel::theta, "theta"},         {FieldKernel::signed_theta, "signed_theta"},
};

const std::string& require(const std::map<std::string, std::string>& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw ConfigError("field metadata lacks '" + key + "'");
  return it->second;
}

std::string optional_value(const std::map<std::string, std::string>& meta, const std::string& key,
                           const std::string& fallback) {
  auto it = meta.find(key);
  return it == meta.end() ? fallback : it->second;
}

}  // namespace

std::string_view to_string(FieldKernel k) {
  for (const auto& kn : kKernelNames)
    if (kn.kernel == k) return kn.name;
  return "unknown";
}

FieldKernel parse_kernel(std::string_view name) {
  std::string s(name);
  for (auto& ch : s)
    if (ch == '-') ch = '_';
  if (s == "ftc") s = "ftc_ratio";
  for (const auto& kn : kKernelNames)
    if (kn.name == s) return kn.kernel;
  throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

CellResult evaluate_point(const FlowSystem& flow, const Epoch& epoch, FieldKernel kernel,
                          const Point2& z, const FieldSettings& settings) {
  CellResult out;
  try {
    switch (kernel) {
      case FieldKernel::ftle:
        out.value = ftle(flow, z, epoch, settings.kernel);
        break;
      case FieldKernel::maxftc:
      case FieldKernel::minftc:
      case FieldKernel::ftc_ratio: {
        const auto k = ftc_point(flow, z, epoch, settings.probe, settings.kernel.integrator);
        out.value = kernel == FieldKernel::maxftc ? k.C : kernel == FieldKernel::minftc ? k.c : k.r;
        break;
      }
      case FieldKernel::theta:
      case FieldKernel::signed_theta: {
        const auto f = foliation_pair(flow, z, epoch, settings.kernel);
        if (f.degenerate) {
          out.status = CellResult::Status::degenerate;
          out.value = std::numeric_limits<double>::quiet_NaN();
        } else {
          out.value = kernel == FieldKernel::theta ? f.theta : f.signed_theta;
        }
        break;
      }
    }
    if (out.status == CellResult::Status::ok && !std::isfinite(out.value))
      throw NumericalError("kernel produced a non-finite value");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    out.status = CellResult::Status::failed;
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.error = e.what();
  }
  return out;
}

CellResult evaluate_cell(const FlowSystem& flow, const Epoch& epoch, FieldKernel kernel,
                         const GridSpec& spec, int i, int j, const FieldSettings& settings) {
  return evaluate_point(flow, epoch, kernel, spec.cell_center(i, j), settings);
}

void for_each_row(int ny, int threads, const std::function<void(int)>& row_fn) {
  threads = std::clamp(threads, 1, std::max(1, ny));
  if (threads == 1) {
    for (int j = 0; j < ny; ++j) row_fn(j);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int j = next.fetch_add(1); j < ny; j = next.fetch_add(1)) {
      try {
        row_fn(j);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(ny);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

FieldGrid compute_field(const FlowSystem& flow, const Epoch& epoch, FieldKernel kernel,
                        const GridSpec& spec, const FieldSettings& settings) {
  spec.validate();
  if (epoch.tau == 0.0) throw ConfigError("field kernels need a nonzero epoch length");
  FieldGrid field(spec);
  std::vector<CellResult::Status> status(spec.size(), CellResult::Status::ok);
  std::vector<std::string> first_error(static_cast<std::size_t>(spec.ny));

  for_each_row(spec.ny, settings.threads, [&](int j) {
    for (int i = 0; i < spec.nx; ++i) {
      const auto k = field.index(i, j);
      auto res = evaluate_cell(flow, epoch, kernel, spec, i, j, settings);
      status[k] = res.status;
      if (res.status == CellResult::Status::ok) {
        field.set(k, res.value);
      } else {
        field.set_invalid(k);
        if (res.status == CellResult::Status::failed && first_error[j].empty())
          first_error[j] = res.error;
      }
    }
  });

  const auto failed = static_cast<std::size_t>(
      std::count(status.begin(), status.end(), CellResult::Status::failed));
  const auto degenerate = static_cast<std::size_t>(
      std::count(status.begin(), status.end(), CellResult::Status::degenerate));
  if (static_cast<double>(failed) > settings.max_invalid_fraction * static_cast<double>(spec.size())) {
    std::string example;
    for (const auto& e : first_error)
      if (!e.empty()) {
        example = e;
        break;
      }
    throw NumericalError(std::to_string(failed) + " of " + std::to_string(spec.size()) +
                         " cells failed (" + std::string(to_string(kernel)) +
                         "); first error: " + example);
  }

  field.meta = provenance(flow, epoch, kernel, settings);
  field.meta["failed_cells"] = std::to_string(failed);
  field.meta["degenerate_cells"] = std::to_string(degenerate);
  return field;
}

double sample_bilinear(const FieldGrid& f, const Point2& p) {
  const double fx = std::clamp((p.x() - f.bounds().x_min) / f.dx() - 0.5, 0.0, f.nx() - 1.0);
  const double fy = std::clamp((p.y() - f.bounds().y_min) / f.dy() - 0.5, 0.0, f.ny() - 1.0);
  const int i0 = std::min(static_cast<int>(std::floor(fx)), f.nx() - 2);
  const int j0 = std::min(static_cast<int>(std::floor(fy)), f.ny() - 2);
  const double tx = fx - i0, ty = fy - j0;
  if (!f.valid(i0, j0) || !f.valid(i0 + 1, j0) || !f.valid(i0, j0 + 1) || !f.valid(i0 + 1, j0 + 1))
    return std::numeric_limits<double>::quiet_NaN();
  return (1 - ty) * ((1 - tx) * f(i0, j0) + tx * f(i0 + 1, j0)) +
         ty * ((1 - tx) * f(i0, j0 + 1) + tx * f(i0 + 1, j0 + 1));
}

SliceTrace slice(const FieldGrid& field, const Point2& start, const Point2& end, int n) {
  if (n < 2) throw ConfigError("slice needs at least 2 samples");
  // Tolerate endpoints that sit on the boundary up to rounding.
  const Bounds tol = field.bounds().scaled(1.0 + 1e-12);
  if (!tol.contains(start) || !tol.contains(end))
    throw ConfigError("slice endpoints must lie inside the field bounds");
  SliceTrace trace{start, end, {}, {}};
  trace.positions.reserve(static_cast<std::size_t>(n));
  trace.values.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / (n - 1);
    const Point2 p = start + s * (end - start);
    trace.positions.push_back(p);
    trace.values.push_back(sample_bilinear(field, p));
  }
  return trace;
}

namespace {

std::vector<double> valid_values(const FieldGrid& field) {
  std::vector<double> v;
  v.reserve(field.size());
  for (std::size_t k = 0; k < field.size(); ++k)
    if (field.valid(k)) v.push_back(field.values()[k]);
  return v;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

}  // namespace

double field_quantile(const FieldGrid& field, double q) {
  auto v = valid_values(field);
  if (v.empty()) throw NumericalError("field has no valid cells");
  std::sort(v.begin(), v.end());
  return sorted_quantile(v, std::clamp(q, 0.0, 1.0));
}

FieldStats field_stats(const FieldGrid& field) {
  auto v = valid_values(field);
  if (v.empty()) throw NumericalError("field has no valid cells");
  std::sort(v.begin(), v.end());
  FieldStats s;
  s.valid = v.size();
  s.invalid = field.size() - v.size();
  s.min = v.front();
  s.max = v.back();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.q05 = sorted_quantile(v, 0.05);
  s.q25 = sorted_quantile(v, 0.25);
  s.q50 = sorted_quantile(v, 0.50);
  s.q75 = sorted_quantile(v, 0.75);
  s.q95 = sorted_quantile(v, 0.95);
  return s;
}

std::map<std::string, std::string> provenance(const FlowSystem& flow, const Epoch& epoch,
                                              FieldKernel kernel, const FieldSettings& settings) {
  std::map<std::string, std::string> m;
  m["flow.kind"] = std::string(to_string(flow.kind()));
  const auto& b = flow.bounds();
  m["flow.bounds"] = format_real(b.x_min) + " " + format_real(b.x_max) + " " +
                     format_real(b.y_min) + " " + format_real(b.y_max);
  for (const auto& [k, v] : flow.params())
    if (flow.kind() != FlowKind::custom_hamiltonian) m["flow.param." + k] = format_real(v);
  const auto& terms = flow.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    char key[32];
    std::snprintf(key, sizeof key, "flow.term.%03zu", i);
    m[key] = format_term(terms[i]);
  }
  m["epoch.t0"] = format_real(epoch.t0);
  m["epoch.tau"] = format_real(epoch.tau);
  m["kernel"] = std::string(to_string(kernel));
  const auto& in = settings.kernel.integrator;
  m["integrator.method"] = std::string(to_string(in.method));
  m["integrator.step"] = format_real(in.step);
  m["integrator.default_steps"] = std::to_string(in.default_steps);
  m["integrator.rel_tol"] = format_real(in.rel_tol);
  m["integrator.abs_tol"] = format_real(in.abs_tol);
  m["integrator.guard_factor"] = format_real(in.guard_factor);
  m["jacobian.method"] = std::string(to_string(settings.kernel.jacobian.method));
  m["jacobian.h"] = format_real(settings.kernel.jacobian.h);
  const auto& p = settings.probe;
  m["probe.epsilon"] = format_real(p.epsilon);
  m["probe.n_dirs"] = std::to_string(p.n_dirs);
  m["probe.n_probe"] = std::to_string(p.n_probe);
  m["probe.estimator"] = std::string(to_string(p.estimator));
  m["probe.refine"] = p.refine ? "1" : "0";
  m["probe.max_along"] = p.max_along ? "1" : "0";
  m["max_invalid_fraction"] = format_real(settings.max_invalid_fraction);
  m["settings_hash"] = settings_hash(m);
  return m;
}

std::string settings_hash(const std::map<std::string, std::string>& meta) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : meta) {
    if (k == "settings_hash") continue;
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

FlowSystem flow_from_meta(const std::map<std::string, std::string>& meta) {
  const FlowKind kind = parse_flow_kind(require(meta, "flow.kind"));
  std::map<std::string, double> params;
  std::vector<HamiltonianTerm> terms;
  for (const auto& [k, v] : meta) {
    if (k.rfind("flow.param.", 0) == 0) params[k.substr(11)] = parse_real(v);
    if (k.rfind("flow.term.", 0) == 0) terms.push_back(parse_term(v));
  }
  FlowSystem flow = FlowSystem::from_params(kind, params, std::move(terms));
  if (auto it = meta.find("flow.bounds"); it != meta.end()) {
    std::vector<double> b;
    for (const auto& tok : split(it->second, ' '))
      if (!tok.empty()) b.push_back(parse_real(tok));
    if (b.size() != 4) throw ConfigError("flow.bounds needs 4 numbers");
    flow.with_bounds({b[0], b[1], b[2], b[3]});
  }
  return flow;
}

Epoch epoch_from_meta(const std::map<std::string, std::string>& meta) {
  return {parse_real(require(meta, "epoch.t0")), parse_real(require(meta, "epoch.tau"))};
}

FieldSettings settings_from_meta(const std::map<std::string, std::string>& meta) {
  FieldSettings s;
  auto& in = s.kernel.integrator;
  in.method = parse_integrator(optional_value(meta, "integrator.method", "rk4"));
  in.step = parse_real(optional_value(meta, "integrator.step", "0"));
  in.default_steps = static_cast<int>(parse_integer(optional_value(meta, "integrator.default_steps", "500")));
  in.rel_tol = parse_real(optional_value(meta, "integrator.rel_tol", "1e-8"));
  in.abs_tol = parse_real(optional_value(meta, "integrator.abs_tol", "1e-12"));
  in.guard_factor = parse_real(optional_value(meta, "integrator.guard_factor", "10"));
  s.kernel.jacobian.method =
      parse_jacobian_method(optional_value(meta, "jacobian.method", "finite_difference"));
  s.kernel.jacobian.h = parse_real(optional_value(meta, "jacobian.h", "0"));
  auto& p = s.probe;
  p.epsilon = parse_real(optional_value(meta, "probe.epsilon", "0"));
  p.n_dirs = static_cast<int>(parse_integer(optional_value(meta, "probe.n_dirs", "32")));
  p.n_probe = static_cast<int>(parse_integer(optional_value(meta, "probe.n_probe", "3")));
  p.estimator = parse_estimator(optional_value(meta, "probe.estimator", "auto"));
  p.refine = parse_bool(optional_value(meta, "probe.refine", "0"));
  p.max_along = parse_bool(optional_value(meta, "probe.max_along", "0"));
  s.max_invalid_fraction = parse_real(optional_value(meta, "max_invalid_fraction", "0.2"));
  return s;
}

}  // namespace ftc
