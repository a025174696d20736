#include "ftc/curves.hpp"

#include "ftc/errors.hpp"
#include "ftc/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace ftc {

namespace {

struct CurveKindName {
  CurveKind kind;
  std::string_view name;
};

constexpr CurveKindName kCurveKindNames[] = {
    {CurveKind::ftc_trough, "ftc_trough"},
    {CurveKind::ftle_ridge, "ftle_ridge"},
    {CurveKind::zero_splitting, "zero_splitting"},
    {CurveKind::level_set, "level_set"},
};

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

enum class MarchEnd { closed, exited, stagnant, corrector_failed, max_length };

struct March {
  std::vector<Point2> points;
  MarchEnd end;
};

bool correct(const ScalarFunction& f, Point2& q, double level, const ContinuationSettings& s) {
  for (int it = 0; it <= s.max_newton; ++it) {
    const double r = f.value(q) - level;
    if (!std::isfinite(r)) return false;
    if (std::abs(r) <= s.tolerance) return true;
    if (it == s.max_newton) break;
    const Vec2 g = f.gradient(q);
    const double g2 = g.squaredNorm();
    if (!std::isfinite(g2) || std::sqrt(g2) < s.gradient_floor) return false;
    q -= (r / g2) * g;
  }
  return false;
}

March march(const ScalarFunction& f, const Point2& seed, double level, double sign,
            const ContinuationSettings& s) {
  March m{{seed}, MarchEnd::max_length};
  Point2 p = seed;
  double arc = 0.0;
  const std::size_t max_vertices =
      static_cast<std::size_t>(std::min(1e7, s.max_length / s.step + 2.0));
  Vec2 last_dir = Vec2::Zero();
  while (m.points.size() < max_vertices) {
    const Vec2 g = f.gradient(p);
    const double gn = g.norm();
    if (!std::isfinite(gn) || gn < s.gradient_floor) {
      m.end = MarchEnd::stagnant;
      return m;
    }
    Vec2 t = sign * perp(g) / gn;
    // Keep the orientation consistent when the gradient field turns sharply.
    if (last_dir.squaredNorm() > 0.0 && t.dot(last_dir) < 0.0) t = -t;

    Point2 q;
    bool ok = false;
    for (double h = s.step; h >= s.step / 8.0; h *= 0.5) {
      q = p + h * t;
      if (correct(f, q, level, s) && (q - p).norm() > 1e-3 * h && (q - p).dot(t) > 0.0) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      m.end = MarchEnd::corrector_failed;
      return m;
    }
    if (static_cast<int>(m.points.size()) >= s.min_closure_steps &&
        point_segment_distance(seed, p, q) <= 0.5 * s.step) {
      m.end = MarchEnd::closed;
      return m;
    }
    if (!s.domain.contains(q)) {
      m.end = MarchEnd::exited;
      return m;
    }
    m.points.push_back(q);
    arc += (q - p).norm();
    last_dir = (q - p).normalized();
    p = q;
    if (arc >= s.max_length) {
      m.end = MarchEnd::max_length;
      return m;
    }
  }
  return m;
}

}  // namespace

std::string_view to_string(CurveKind k) {
  for (const auto& kn : kCurveKindNames)
    if (kn.kind == k) return kn.name;
  return "level_set";
}

CurveKind parse_curve_kind(std::string_view name) {
  for (const auto& kn : kCurveKindNames)
    if (kn.name == name) return kn.kind;
  throw ConfigError("unknown curve kind '" + std::string(name) + "'");
}

double Polyline::length() const {
  double len = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) len += (points[k] - points[k - 1]).norm();
  if (closed && points.size() > 2) len += (points.front() - points.back()).norm();
  return len;
}

std::vector<GridCell> extract_extremal_points(const FieldGrid& field, ExtremumMode mode, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("extremal quantile must lie in (0, 1)");
  const double cut = field_quantile(field, mode == ExtremumMode::trough ? q : 1.0 - q);
  const bool trough = mode == ExtremumMode::trough;
  auto beats = [trough](double v, double other) { return trough ? v < other : v > other; };

  std::vector<GridCell> cells;
  for (int j = 0; j < field.ny(); ++j) {
    for (int i = 0; i < field.nx(); ++i) {
      if (!field.valid(i, j)) continue;
      const double v = field(i, j);
      if (trough ? !(v < cut) : !(v > cut)) continue;
      bool along_x = i > 0 && i + 1 < field.nx() && field.valid(i - 1, j) &&
                     field.valid(i + 1, j) && beats(v, field(i - 1, j)) && beats(v, field(i + 1, j));
      bool along_y = j > 0 && j + 1 < field.ny() && field.valid(i, j - 1) &&
                     field.valid(i, j + 1) && beats(v, field(i, j - 1)) && beats(v, field(i, j + 1));
      if (along_x || along_y) cells.push_back({i, j});
    }
  }
  return cells;
}

bool project_to_level(const ScalarFunction& f, Point2& p, double level,
                      const ContinuationSettings& settings, double max_distance) {
  Point2 q = p;
  if (!correct(f, q, level, settings)) return false;
  if ((q - p).norm() > max_distance) return false;
  p = q;
  return true;
}

Polyline continue_level_curve(const ScalarFunction& f, const Point2& seed, double level,
                              const ContinuationSettings& s) {
  if (!(s.step > 0.0)) throw ConfigError("continuation step must be > 0");
  const double r0 = f.value(seed) - level;
  if (!(std::abs(r0) <= s.tolerance)) throw ConfigError("continuation seed is not on the level set");
  const Vec2 g0 = f.gradient(seed);
  if (!(g0.norm() >= s.gradient_floor)) throw NumericalError("continuation: zero gradient at seed");

  Polyline out;
  out.level = level;
  March fwd = march(f, seed, level, 1.0, s);
  if (fwd.end == MarchEnd::closed) {
    out.points = std::move(fwd.points);
    out.closed = true;
    return out;
  }
  March bwd = march(f, seed, level, -1.0, s);
  out.points.assign(bwd.points.rbegin(), bwd.points.rend());
  out.points.insert(out.points.end(), fwd.points.begin() + 1, fwd.points.end());
  return out;
}

ContinuationSettings continuation_for(const FieldGrid& field) {
  ContinuationSettings s;
  s.step = 0.5 * std::hypot(field.dx(), field.dy());
  const auto st = field_stats(field);
  s.tolerance = std::max(1e-3 * (st.max - st.min), 1e-14);
  s.domain = field.bounds();
  s.max_length = 4.0 * (field.bounds().width() + field.bounds().height()) * 4.0;
  return s;
}

namespace {

/// Marks cells within one cell of the polyline vertices.
void mark_covered(const FieldGrid& field, const Polyline& curve, std::vector<std::uint8_t>& covered) {
  for (const auto& p : curve.points) {
    const int ci = static_cast<int>(std::floor((p.x() - field.bounds().x_min) / field.dx()));
    const int cj = static_cast<int>(std::floor((p.y() - field.bounds().y_min) / field.dy()));
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int i = ci + di, j = cj + dj;
        if (i >= 0 && j >= 0 && i < field.nx() && j < field.ny()) covered[field.index(i, j)] = 1;
      }
  }
}

}  // namespace

std::vector<Polyline> trace_from_seeds(const FieldGrid& field, const std::vector<GridCell>& seeds,
                                       CurveKind kind, const ContinuationSettings& settings) {
  const BicubicField interp(field);
  const ScalarFunction f = interp.as_function();
  std::vector<std::uint8_t> covered(field.size(), 0);
  std::vector<Polyline> curves;
  for (const auto& cell : seeds) {
    if (!field.valid(cell.i, cell.j) || covered[field.index(cell.i, cell.j)]) continue;
    const Point2 seed = field.cell_center(cell.i, cell.j);
    const double level = f.value(seed);
    try {
      Polyline c = continue_level_curve(f, seed, level, settings);
      if (c.points.size() < 2) continue;
      c.kind = kind;
      mark_covered(field, c, covered);
      curves.push_back(std::move(c));
    } catch (const Error&) {
      continue;
    }
  }
  return deduplicate(std::move(curves), std::max(field.dx(), field.dy()));
}

std::vector<Polyline> zero_splitting_from_field(const FieldGrid& signed_theta, double theta_tol) {
  if (!(theta_tol > 0.0)) throw ConfigError("theta tolerance must be > 0");
  const auto& field = signed_theta;
  std::vector<GridCell> seeds;
  auto mag = [&](int i, int j) { return std::abs(field(i, j)); };
  for (int j = 0; j < field.ny(); ++j) {
    for (int i = 0; i < field.nx(); ++i) {
      if (!field.valid(i, j) || !(mag(i, j) < theta_tol)) continue;
      const double v = mag(i, j);
      const bool along_x = i > 0 && i + 1 < field.nx() && field.valid(i - 1, j) &&
                           field.valid(i + 1, j) && v < mag(i - 1, j) && v < mag(i + 1, j);
      const bool along_y = j > 0 && j + 1 < field.ny() && field.valid(i, j - 1) &&
                           field.valid(i, j + 1) && v < mag(i, j - 1) && v < mag(i, j + 1);
      if (along_x || along_y) seeds.push_back({i, j});
    }
  }
  if (seeds.empty()) return {};

  ContinuationSettings s = continuation_for(field);
  const BicubicField interp(field);
  const ScalarFunction f = interp.as_function();
  const double cell = std::hypot(field.dx(), field.dy());
  std::vector<std::uint8_t> covered(field.size(), 0);
  std::vector<Polyline> curves;
  for (const auto& c : seeds) {
    if (covered[field.index(c.i, c.j)]) continue;
    Point2 seed = field.cell_center(c.i, c.j);
    if (!project_to_level(f, seed, 0.0, s, cell)) continue;
    try {
      Polyline curve = continue_level_curve(f, seed, 0.0, s);
      if (curve.points.size() < 2) continue;
      curve.kind = CurveKind::zero_splitting;
      mark_covered(field, curve, covered);
      curves.push_back(std::move(curve));
    } catch (const Error&) {
      continue;
    }
  }
  return deduplicate(std::move(curves), std::max(field.dx(), field.dy()));
}

std::vector<Polyline> zero_splitting_curves(const FlowSystem& flow, const Epoch& epoch,
                                            const GridSpec& grid,
                                            const ZeroSplittingSettings& settings) {
  const FieldGrid field = compute_field(flow, epoch, FieldKernel::signed_theta, grid, settings.field);
  if (field.invalid_count() == field.size()) return {};
  return zero_splitting_from_field(field, settings.theta_tol);
}

std::vector<Polyline> deduplicate(std::vector<Polyline> curves, double radius) {
  std::vector<Polyline> kept;
  for (auto& c : curves) {
    std::size_t near = 0;
    for (const auto& p : c.points) {
      bool hit = false;
      for (const auto& k : kept) {
        for (const auto& q : k.points)
          if ((p - q).norm() <= radius) {
            hit = true;
            break;
          }
        if (hit) break;
      }
      if (hit) ++near;
    }
    if (2 * near > c.points.size()) continue;
    kept.push_back(std::move(c));
  }
  return kept;
}

double polyline_distance(const Polyline& a, const Polyline& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.points)
    for (const auto& q : b.points) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

bool encloses(const Polyline& closed, const Point2& p) {
  const auto& v = closed.points;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

void write_polylines(std::ostream& out, const std::vector<Polyline>& curves) {
  out << "kind,level,closed\n";
  for (const auto& c : curves) {
    out << to_string(c.kind) << ',' << format_real(c.level) << ',' << (c.closed ? 1 : 0) << '\n';
    out << "x,y\n";
    for (const auto& p : c.points) out << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
    out << '\n';
  }
}

std::vector<Polyline> read_polylines(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "kind,level,closed")
    throw ConfigError("polyline CSV: missing header");
  std::vector<Polyline> curves;
  Polyline* cur = nullptr;
  bool expect_xy = false;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) {
      cur = nullptr;
      continue;
    }
    if (!cur) {
      const auto f = split(t, ',');
      if (f.size() != 3) throw ConfigError("polyline CSV: bad record line");
      curves.push_back({{}, parse_bool(f[2]), parse_curve_kind(f[0]), parse_real(f[1])});
      cur = &curves.back();
      expect_xy = true;
      continue;
    }
    if (expect_xy) {
      if (t != "x,y") throw ConfigError("polyline CSV: expected 'x,y'");
      expect_xy = false;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 2) throw ConfigError("polyline CSV: bad vertex row");
    cur->points.emplace_back(parse_real(f[0]), parse_real(f[1]));
  }
  return curves;
}

FieldGrid log10_field(const FieldGrid& field) {
  FieldGrid out(field.spec());
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double v = field.values()[k];
    if (field.valid(k) && v > 0.0)
      out.set(k, std::log10(v));
    else
      out.set_invalid(k);
  }
  out.meta = field.meta;
  return out;
}

std::vector<Polyline> ftc_troughs(const FieldGrid& ratio, double q) {
  const FieldGrid lf = log10_field(ratio);
  if (lf.invalid_count() == lf.size()) return {};
  const auto st = field_stats(lf);
  if (!(st.max > st.min)) return {};
  auto curves = trace_from_seeds(lf, extract_extremal_points(lf, ExtremumMode::trough, q),
                                 CurveKind::ftc_trough, continuation_for(lf));
  for (auto& c : curves) c.level = std::pow(10.0, c.level);
  return curves;
}

std::vector<Polyline> ftle_ridges(const FieldGrid& ftle, double q) {
  if (ftle.invalid_count() == ftle.size()) return {};
  const auto st = field_stats(ftle);
  if (!(st.max > st.min)) return {};
  return trace_from_seeds(ftle, extract_extremal_points(ftle, ExtremumMode::ridge, q),
                          CurveKind::ftle_ridge, continuation_for(ftle));
}

}  // namespace ftc
