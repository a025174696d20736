#include "ftc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ftc {

namespace {

using State = Eigen::Matrix<double, 2, Eigen::Dynamic>;

int fixed_step_count(double tau, const IntegratorSettings& s) {
  if (s.step < 0.0 || !std::isfinite(s.step)) throw ConfigError("integrator step must be > 0");
  if (s.step > 0.0) return std::max(1, static_cast<int>(std::ceil(std::abs(tau) / s.step - 1e-9)));
  if (s.default_steps < 1) throw ConfigError("integrator default_steps must be >= 1");
  return s.default_steps;
}

std::string describe(const Point2& p, double t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.9g, %.9g) at t=%.9g", p.x(), p.y(), t);
  return buf;
}

/// Throws when any tracked position leaves the guard box or becomes non-finite.
/// Column 0 is the reference position; when `relative` the other columns are
/// offsets from it, otherwise they are not positions at all.
struct Guard {
  Bounds box;
  bool enabled;
  bool relative;

  void operator()(const State& y, double t) const {
    if (!y.allFinite()) {
      for (Eigen::Index k = 0; k < y.cols(); ++k)
        if (!y.col(k).allFinite())
          throw BundleEscapeError("non-finite state at t=" + std::to_string(t),
                                  static_cast<std::size_t>(k));
    }
    if (!enabled) return;
    const Point2 c = y.col(0);
    if (!box.contains(c))
      throw BundleEscapeError("trajectory left the guard box at " + describe(c, t), 0);
    if (!relative) return;
    for (Eigen::Index k = 1; k < y.cols(); ++k) {
      const Point2 p = c + y.col(k);
      if (!box.contains(p))
        throw BundleEscapeError("trajectory left the guard box at " + describe(p, t),
                                static_cast<std::size_t>(k));
    }
  }
};

template <class Rhs>
void run_rk4(Rhs&& rhs, State& y, double t0, double tau, int n, const Guard& guard) {
  const double h = tau / n;
  State k1(2, y.cols()), k2(2, y.cols()), k3(2, y.cols()), k4(2, y.cols()), tmp(2, y.cols());
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    rhs(t, y, k1);
    tmp = y + (0.5 * h) * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + (0.5 * h) * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    guard(y, t + h);
  }
}

/// Dormand-Prince 5(4) with FSAL and standard step-size control.
template <class Rhs>
void run_rk45(Rhs&& rhs, State& y, double t0, double tau, const IntegratorSettings& s,
              const Guard& guard) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(s.rel_tol > 0.0) || !(s.abs_tol >= 0.0))
    throw ConfigError("rk45 tolerances must be positive");
  const double dir = tau > 0.0 ? 1.0 : -1.0;
  const double t_end = t0 + tau;
  double t = t0;
  double h = dir * std::abs(tau) / 100.0;
  const auto cols = y.cols();
  State k1(2, cols), k2(2, cols), k3(2, cols), k4(2, cols), k5(2, cols), k6(2, cols),
      k7(2, cols), tmp(2, cols), ynew(2, cols), err(2, cols);
  rhs(t, y, k1);
  constexpr int kMaxSteps = 1000000;
  for (int step = 0; step < kMaxSteps; ++step) {
    if (dir * (t_end - t) <= 0.0) return;
    bool last = false;
    if (dir * (t + h - t_end) >= 0.0) {
      h = t_end - t;
      last = true;
    }
    tmp = y + h * (a21 * k1);
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sum = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j)
      for (int i = 0; i < 2; ++i) {
        const double sc = s.abs_tol + s.rel_tol * std::max(std::abs(y(i, j)), std::abs(ynew(i, j)));
        const double r = err(i, j) / sc;
        sum += r * r;
      }
    const double norm = std::sqrt(sum / static_cast<double>(2 * cols));
    if (!std::isfinite(norm)) throw NumericalError("rk45: non-finite error estimate");
    if (norm <= 1.0) {
      t = last ? t_end : t + h;
      y = ynew;
      k1 = k7;
      guard(y, t);
      if (last) return;
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= factor;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      throw NumericalError("rk45: step size underflow at t=" + std::to_string(t));
  }
  throw NumericalError("rk45: step budget exhausted");
}

template <class Rhs>
void integrate(Rhs&& rhs, State& y, const Epoch& epoch, const IntegratorSettings& s,
               const Guard& guard) {
  if (!std::isfinite(epoch.t0) || !std::isfinite(epoch.tau))
    throw ConfigError("epoch must be finite");
  guard(y, epoch.t0);
  if (epoch.tau == 0.0) return;
  if (s.method == Integrator::rk4)
    run_rk4(rhs, y, epoch.t0, epoch.tau, fixed_step_count(epoch.tau, s), guard);
  else
    run_rk45(rhs, y, epoch.t0, epoch.tau, s, guard);
}

Guard make_guard(const FlowSystem& flow, const IntegratorSettings& s, bool relative) {
  const bool enabled = s.guard_factor > 0.0;
  return Guard{enabled ? flow.bounds().scaled(s.guard_factor) : flow.bounds(), enabled, relative};
}

double stencil_h(const FlowSystem& flow, const JacobianSettings& jac) {
  if (jac.h < 0.0 || !std::isfinite(jac.h)) throw ConfigError("jacobian h must be > 0");
  return jac.h > 0.0 ? jac.h : 1e-4 * flow.bounds().width();
}

constexpr const char* kCornerNames[] = {"reference point", "z+h*e1", "z-h*e1", "z+h*e2",
                                        "z-h*e2"};

}  // namespace

std::string_view to_string(Integrator m) { return m == Integrator::rk4 ? "rk4" : "rk45"; }

Integrator parse_integrator(std::string_view name) {
  if (name == "rk4") return Integrator::rk4;
  if (name == "rk45") return Integrator::rk45;
  throw ConfigError("unknown integrator '" + std::string(name) + "' (expected rk4 or rk45)");
}

std::string_view to_string(JacobianMethod m) {
  return m == JacobianMethod::finite_difference ? "finite_difference" : "variational";
}

JacobianMethod parse_jacobian_method(std::string_view name) {
  if (name == "finite_difference" || name == "fd") return JacobianMethod::finite_difference;
  if (name == "variational") return JacobianMethod::variational;
  throw ConfigError("unknown jacobian method '" + std::string(name) + "'");
}

BundleImage advect_bundle(const FlowSystem& flow, const Point2& center,
                          std::span<const Vec2> offsets, const Epoch& epoch,
                          const IntegratorSettings& settings) {
  State y(2, static_cast<Eigen::Index>(offsets.size()) + 1);
  y.col(0) = center;
  for (std::size_t k = 0; k < offsets.size(); ++k) y.col(static_cast<Eigen::Index>(k) + 1) = offsets[k];

  auto rhs = [&flow](double t, const State& s, State& ds) {
    const Point2 c = s.col(0);
    const Vec2 gc = flow.velocity(c, t);
    ds.col(0) = gc;
    for (Eigen::Index k = 1; k < s.cols(); ++k)
      ds.col(k) = flow.velocity_difference(c, s.col(k), t, gc);
  };
  integrate(rhs, y, epoch, settings, make_guard(flow, settings, true));

  BundleImage out;
  out.center = y.col(0);
  out.offsets.resize(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k)
    out.offsets[k] = y.col(static_cast<Eigen::Index>(k) + 1);
  return out;
}

Point2 flow_map(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                const IntegratorSettings& settings) {
  return advect_bundle(flow, z, {}, epoch, settings).center;
}

FlowMapDerivative flow_map_with_jacobian(const FlowSystem& flow, const Point2& z,
                                         const Epoch& epoch, const IntegratorSettings& settings,
                                         const JacobianSettings& jac) {
  if (jac.method == JacobianMethod::variational) {
    State y(2, 3);
    y.col(0) = z;
    y.rightCols<2>().setIdentity();
    auto rhs = [&flow](double t, const State& s, State& ds) {
      const Point2 p = s.col(0);
      ds.col(0) = flow.velocity(p, t);
      ds.rightCols<2>() = flow.velocity_gradient(p, t) * s.rightCols<2>();
    };
    integrate(rhs, y, epoch, settings, make_guard(flow, settings, false));
    return {y.col(0), y.rightCols<2>()};
  }

  const double h = stencil_h(flow, jac);
  const Vec2 stencil[4] = {{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}};
  BundleImage img;
  try {
    img = advect_bundle(flow, z, stencil, epoch, settings);
  } catch (const BundleEscapeError& e) {
    throw BundleEscapeError(std::string(e.what()) + " [stencil corner " +
                                kCornerNames[std::min<std::size_t>(e.member(), 4)] + "]",
                            e.member());
  }
  Jacobian2 J;
  J.col(0) = (img.offsets[0] - img.offsets[1]) / (2.0 * h);
  J.col(1) = (img.offsets[2] - img.offsets[3]) / (2.0 * h);
  return {img.center, J};
}

Jacobian2 flow_jacobian(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                        const IntegratorSettings& settings, const JacobianSettings& jac) {
  return flow_map_with_jacobian(flow, z, epoch, settings, jac).jacobian;
}

std::vector<Point2> advect_polyline(const FlowSystem& flow, std::span<const Point2> points,
                                    const Epoch& epoch, const IntegratorSettings& settings) {
  if (points.size() < 2) throw ConfigError("advect_polyline needs at least 2 points");
  std::vector<Point2> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      out.push_back(flow_map(flow, points[i], epoch, settings));
    } catch (const EscapeError& e) {
      throw EscapeError("polyline point " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ftc
