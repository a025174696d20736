#include "ftc/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftc {

double parametric_curvature(std::span<const Point2> curve, std::size_t index) {
  if (index == 0 || index + 1 >= curve.size())
    throw ConfigError("parametric curvature needs an interior index");
  const std::size_t i = index;
  Vec2 d1, d2;
  if (i >= 2 && i + 2 < curve.size()) {
    const Point2 &m2 = curve[i - 2], &m1 = curve[i - 1], &c = curve[i], &p1 = curve[i + 1],
                 &p2 = curve[i + 2];
    d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / 12.0;
    d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / 12.0;
  } else {
    d1 = 0.5 * (curve[i + 1] - curve[i - 1]);
    d2 = curve[i + 1] - 2.0 * curve[i] + curve[i - 1];
  }
  const double speed2 = d1.squaredNorm();
  if (!(speed2 > std::numeric_limits<double>::min()))
    throw NumericalError("parametric curvature: zero tangent");
  return std::abs(cross(d1, d2)) / (speed2 * std::sqrt(speed2));
}

std::string_view to_string(CurvatureEstimator e) {
  switch (e) {
    case CurvatureEstimator::automatic:
      return "auto";
    case CurvatureEstimator::menger:
      return "menger";
    case CurvatureEstimator::parametric:
      return "parametric";
  }
  return "auto";
}

CurvatureEstimator parse_estimator(std::string_view name) {
  if (name == "auto") return CurvatureEstimator::automatic;
  if (name == "menger") return CurvatureEstimator::menger;
  if (name == "parametric") return CurvatureEstimator::parametric;
  throw ConfigError("unknown curvature estimator '" + std::string(name) + "'");
}

double ratio_floor(const FlowSystem& flow) { return 1e-12 / flow.bounds().width(); }

namespace {

double curvature_at(std::span<const Point2> pts, std::size_t i, CurvatureEstimator est) {
  if (est == CurvatureEstimator::menger) return menger_curvature(pts[i - 1], pts[i], pts[i + 1]);
  return parametric_curvature(pts, i);
}

CurvatureEstimator resolve(CurvatureEstimator est, std::size_t n_points) {
  if (est != CurvatureEstimator::automatic) return est;
  return n_points == 3 ? CurvatureEstimator::menger : CurvatureEstimator::parametric;
}

double image_curvature(std::span<const Point2> pts, std::size_t center, CurvatureEstimator est,
                       bool max_along) {
  est = resolve(est, pts.size());
  if (!max_along) return curvature_at(pts, center, est);
  double best = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) best = std::max(best, curvature_at(pts, i, est));
  return best;
}

void validate(const ProbeSettings& p) {
  if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon))
    throw ConfigError("probe epsilon must be > 0");
  if (p.n_dirs < 4) throw ConfigError("probe n_dirs must be >= 4");
  if (p.n_probe < 3 || p.n_probe % 2 == 0) throw ConfigError("probe n_probe must be odd and >= 3");
}

double probe_epsilon(const FlowSystem& flow, const ProbeSettings& p) {
  return p.epsilon > 0.0 ? p.epsilon : 1e-4 * flow.bounds().width();
}

/// Offsets s_k * eps * v for the non-center samples of one segment.
void append_segment(std::vector<Vec2>& offsets, const Vec2& v, double eps, int n_probe) {
  const int half = (n_probe - 1) / 2;
  for (int k = 0; k < n_probe; ++k) {
    if (k == half) continue;
    const double s = static_cast<double>(k - half) / half;
    offsets.push_back(s * eps * v);
  }
}

/// Rebuilds segment `seg` (relative to the advected center) from a bundle image.
void gather_segment(const BundleImage& img, std::size_t seg, int n_probe,
                    std::vector<Point2>& out) {
  const std::size_t per = static_cast<std::size_t>(n_probe - 1);
  const std::size_t half = per / 2;
  out.clear();
  for (std::size_t k = 0; k < per; ++k) {
    if (k == half) out.push_back(Point2::Zero());
    out.push_back(img.offsets[seg * per + k]);
  }
}

double kappa_or_nan(std::span<const Point2> pts, std::size_t center, const ProbeSettings& p) {
  try {
    return image_curvature(pts, center, p.estimator, p.max_along);
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double direction_kappa(const FlowSystem& flow, const Point2& z, double angle, double eps,
                       const Epoch& epoch, const ProbeSettings& p,
                       const IntegratorSettings& integrator) {
  std::vector<Vec2> offsets;
  append_segment(offsets, {std::cos(angle), std::sin(angle)}, eps, p.n_probe);
  const BundleImage img = advect_bundle(flow, z, offsets, epoch, integrator);
  std::vector<Point2> pts;
  gather_segment(img, 0, p.n_probe, pts);
  return kappa_or_nan(pts, static_cast<std::size_t>(p.n_probe / 2), p);
}

/// Golden-section search for an extremum of kappa(angle) on [lo, hi].
std::pair<double, double> golden(const FlowSystem& flow, const Point2& z, double lo, double hi,
                                 bool maximize, double eps, const Epoch& epoch,
                                 const ProbeSettings& p, const IntegratorSettings& integrator) {
  constexpr double g = 0.6180339887498949;
  auto score = [&](double a) {
    const double k = direction_kappa(flow, z, a, eps, epoch, p, integrator);
    if (std::isnan(k)) return maximize ? -1.0 : std::numeric_limits<double>::infinity();
    return k;
  };
  auto better = [maximize](double a, double b) { return maximize ? a > b : a < b; };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = score(x1), f2 = score(x2);
  for (int it = 0; it < 24; ++it) {
    if (better(f1, f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = score(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = score(x2);
    }
  }
  return better(f1, f2) ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

double probe_curvature(const FlowSystem& flow, std::span<const Point2> points,
                       std::size_t center_index, const Epoch& epoch,
                       const IntegratorSettings& integrator, CurvatureEstimator estimator) {
  if (points.size() < 3 || center_index == 0 || center_index + 1 >= points.size())
    throw ConfigError("probe needs at least 3 points and an interior center");
  std::vector<Vec2> offsets;
  for (std::size_t k = 0; k < points.size(); ++k)
    if (k != center_index) offsets.push_back(points[k] - points[center_index]);
  const BundleImage img = advect_bundle(flow, points[center_index], offsets, epoch, integrator);
  std::vector<Point2> pts;
  for (std::size_t k = 0, o = 0; k < points.size(); ++k)
    pts.push_back(k == center_index ? Point2::Zero() : Point2(img.offsets[o++]));
  return image_curvature(pts, center_index, estimator, false);
}

std::vector<DirectionCurvature> ftc_direction_scan(const FlowSystem& flow, const Point2& z,
                                                   const Epoch& epoch, const ProbeSettings& p,
                                                   const IntegratorSettings& integrator) {
  validate(p);
  const double eps = probe_epsilon(flow, p);
  std::vector<Vec2> offsets;
  offsets.reserve(static_cast<std::size_t>(p.n_dirs * (p.n_probe - 1)));
  std::vector<double> angles(static_cast<std::size_t>(p.n_dirs));
  for (int j = 0; j < p.n_dirs; ++j) {
    angles[static_cast<std::size_t>(j)] = kPi * j / p.n_dirs;
    append_segment(offsets, {std::cos(angles[j]), std::sin(angles[j])}, eps, p.n_probe);
  }
  const BundleImage img = advect_bundle(flow, z, offsets, epoch, integrator);

  std::vector<DirectionCurvature> scan;
  scan.reserve(angles.size());
  std::vector<Point2> pts;
  for (std::size_t j = 0; j < angles.size(); ++j) {
    gather_segment(img, j, p.n_probe, pts);
    scan.push_back({angles[j], kappa_or_nan(pts, static_cast<std::size_t>(p.n_probe / 2), p)});
  }
  return scan;
}

CurvatureTriple ftc_point(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                          const ProbeSettings& p, const IntegratorSettings& integrator) {
  const auto scan = ftc_direction_scan(flow, z, epoch, p, integrator);
  CurvatureTriple out;
  double best_angle = 0.0, worst_angle = 0.0;
  bool any = false;
  for (const auto& d : scan) {
    if (std::isnan(d.kappa)) continue;
    if (!any || d.kappa > out.C) {
      out.C = d.kappa;
      best_angle = d.angle;
    }
    if (!any || d.kappa < out.c) {
      out.c = d.kappa;
      worst_angle = d.angle;
    }
    any = true;
  }
  if (!any) {
    out.degenerate = true;
    return out;
  }
  if (p.refine) {
    const double eps = probe_epsilon(flow, p);
    const double half = kPi / p.n_dirs;
    const auto hi = golden(flow, z, best_angle - half, best_angle + half, true, eps, epoch, p,
                           integrator);
    if (hi.second > out.C) {
      out.C = hi.second;
      best_angle = hi.first;
    }
    const auto lo = golden(flow, z, worst_angle - half, worst_angle + half, false, eps, epoch, p,
                           integrator);
    if (lo.second < out.c) {
      out.c = lo.second;
      worst_angle = lo.first;
    }
  }
  out.dir_max = {std::cos(best_angle), std::sin(best_angle)};
  out.dir_min = {std::cos(worst_angle), std::sin(worst_angle)};
  const double delta = ratio_floor(flow);
  out.r = (out.C + delta) / (out.c + delta);
  return out;
}

}  // namespace ftc
