#pragma once

#include "ftc/errors.hpp"
#include "ftc/integrate.hpp"
#include "ftc/spectral.hpp"
#include "ftc/types.hpp"

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace ftc {

/// Curvature of the circle through three points: 4 area / (|pq| |qw| |wp|).
template <typename Scalar>
Scalar menger_curvature(const Vector2<Scalar>& p, const Vector2<Scalar>& q,
                        const Vector2<Scalar>& w) {
  using std::abs;
  const Vector2<Scalar> a = p - q;
  const Vector2<Scalar> b = w - q;
  const Scalar la = a.norm();
  const Scalar lb = b.norm();
  const Scalar lc = (w - p).norm();
  if (la == 0 || lb == 0 || lc == 0) throw NumericalError("menger curvature: coincident points");
  // |cross| is twice the triangle area.
  return 2 * abs(cross(a, b)) / (la * lb * lc);
}

/// |x'y'' - y'x''| / (x'^2 + y'^2)^(3/2) at curve[index] with central differences in
/// the (uniform) sample parameter. Uses a five-point stencil where two neighbours
/// exist on each side, three points otherwise.
double parametric_curvature(std::span<const Point2> curve, std::size_t index);

enum class CurvatureEstimator { automatic, menger, parametric };

std::string_view to_string(CurvatureEstimator e);
CurvatureEstimator parse_estimator(std::string_view name);

/// Settings of the infinitesimal-segment probe used by the FTC kernels.
struct ProbeSettings {
  /// Segment half length; 0 selects 1e-4 of the domain width.
  double epsilon = 0.0;
  /// Directions sampled uniformly over [0, pi).
  int n_dirs = 32;
  /// Samples along each segment, odd, center included.
  int n_probe = 3;
  CurvatureEstimator estimator = CurvatureEstimator::automatic;
  /// Golden-section refinement of the extremal directions.
  bool refine = false;
  /// Use the largest curvature along the advected segment instead of its center value.
  bool max_along = false;
};

struct CurvatureTriple {
  double C = 0.0;
  double c = 0.0;
  double r = 1.0;
  Vec2 dir_max = Vec2::UnitX();
  Vec2 dir_min = Vec2::UnitX();
  /// Every direction produced a degenerate (zero-tangent) image.
  bool degenerate = false;
};

/// Curvature at sample `center_index` of the image of `points` after the epoch. The
/// points are advected as offsets from points[center_index].
double probe_curvature(const FlowSystem& flow, std::span<const Point2> points,
                       std::size_t center_index, const Epoch& epoch,
                       const IntegratorSettings& integrator = {},
                       CurvatureEstimator estimator = CurvatureEstimator::automatic);

struct DirectionCurvature {
  double angle;
  /// NaN marks a degenerate direction.
  double kappa;
};

/// Per-direction terminal curvature of advected segments through z.
std::vector<DirectionCurvature> ftc_direction_scan(const FlowSystem& flow, const Point2& z,
                                                   const Epoch& epoch,
                                                   const ProbeSettings& probe = {},
                                                   const IntegratorSettings& integrator = {});

/// maxFTC, minFTC and the regularized ratio at z.
CurvatureTriple ftc_point(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                          const ProbeSettings& probe = {},
                          const IntegratorSettings& integrator = {});

/// Floor added to both curvatures before forming the ratio.
double ratio_floor(const FlowSystem& flow);

}  // namespace ftc
