#pragma once

#include "ftc/fields.hpp"
#include "ftc/interpolate.hpp"
#include "ftc/types.hpp"

#include <iosfwd>
#include <string_view>
#include <vector>

namespace ftc {

enum class CurveKind { ftc_trough, ftle_ridge, zero_splitting, level_set };

std::string_view to_string(CurveKind k);
CurveKind parse_curve_kind(std::string_view name);

struct Polyline {
  std::vector<Point2> points;
  bool closed = false;
  CurveKind kind = CurveKind::level_set;
  double level = 0.0;

  double length() const;
};

struct GridCell {
  int i = 0;
  int j = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

enum class ExtremumMode { trough, ridge };

/// Cells that are strict minima (trough) or maxima (ridge) along either grid axis and
/// lie below the q-quantile (trough) or above the (1-q)-quantile (ridge) of the field.
/// Returned in row-major order.
std::vector<GridCell> extract_extremal_points(const FieldGrid& field, ExtremumMode mode, double q);

struct ContinuationSettings {
  /// March step; 0 selects half a cell diagonal where a grid is known.
  double step = 0.0;
  double max_length = 1e300;
  /// Corrector target |f - level|.
  double tolerance = 1e-6;
  double gradient_floor = 1e-12;
  /// Marching stops on leaving this box.
  Bounds domain;
  int max_newton = 20;
  /// Steps required before a return to the seed counts as closure.
  int min_closure_steps = 10;
};

/// Level curve of `f` through `seed` by predictor-corrector continuation: a tangent step
/// perpendicular to the gradient, then Newton correction along the gradient. Marches in
/// both directions unless the curve closes.
Polyline continue_level_curve(const ScalarFunction& f, const Point2& seed, double level,
                              const ContinuationSettings& settings);

/// Newton projection of `p` onto {f = level} along the gradient; returns false when it
/// fails to converge within `max_distance`.
bool project_to_level(const ScalarFunction& f, Point2& p, double level,
                      const ContinuationSettings& settings, double max_distance);

/// Continuation defaults for a grid: step = half a cell diagonal, tolerance = 1e-3 of the
/// field range, domain = grid bounds.
ContinuationSettings continuation_for(const FieldGrid& field);

/// Continues level curves from every seed cell at the seed's value, skipping seeds that
/// already lie within one cell of an earlier curve, then drops near-duplicates.
std::vector<Polyline> trace_from_seeds(const FieldGrid& field, const std::vector<GridCell>& seeds,
                                       CurveKind kind, const ContinuationSettings& settings);

struct ZeroSplittingSettings {
  double theta_tol = 0.05;
  FieldSettings field;
};

/// Tangency curves of the stable and unstable foliations, traced as the zero level of the
/// signed splitting angle from seeds where |theta| is a small directional minimum.
std::vector<Polyline> zero_splitting_curves(const FlowSystem& flow, const Epoch& epoch,
                                            const GridSpec& grid,
                                            const ZeroSplittingSettings& settings = {});

/// Same, from a precomputed signed_theta field.
std::vector<Polyline> zero_splitting_from_field(const FieldGrid& signed_theta, double theta_tol);

/// Base-10 logarithm of a positive field; non-positive and masked cells become masked.
FieldGrid log10_field(const FieldGrid& field);

/// Trough curves of an FTC ratio field, traced on log10 of the ratio from the q-quantile
/// trough cells. Levels are reported back in ratio units.
std::vector<Polyline> ftc_troughs(const FieldGrid& ratio, double q = 0.1);

/// Ridge curves of an FTLE field from its (1-q)-quantile ridge cells.
std::vector<Polyline> ftle_ridges(const FieldGrid& ftle, double q = 0.1);

/// Removes curves with more than half of their vertices within `radius` of an earlier curve.
std::vector<Polyline> deduplicate(std::vector<Polyline> curves, double radius);

/// Smallest distance between vertices of two polylines.
double polyline_distance(const Polyline& a, const Polyline& b);

/// Even-odd point-in-polygon test against a closed polyline.
bool encloses(const Polyline& closed, const Point2& p);

/// CSV export: header `kind,level,closed`, then per curve a record line, an `x,y` line and
/// the vertex rows, followed by a blank line.
void write_polylines(std::ostream& out, const std::vector<Polyline>& curves);
std::vector<Polyline> read_polylines(std::istream& in);

}  // namespace ftc
