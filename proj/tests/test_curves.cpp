#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "ftc/curves.hpp"
#include "ftc/errors.hpp"
#include "ftc/interpolate.hpp"

#include <set>
#include <sstream>

using namespace ftc;

namespace {

FieldGrid sampled(const GridSpec& g, const std::function<double(const Point2&)>& f) {
  FieldGrid out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.cell_center(i, j));
  return out;
}

ScalarFunction analytic(std::function<double(const Point2&)> v, std::function<Vec2(const Point2&)> g) {
  return {std::move(v), std::move(g)};
}

double segment_cross(const Point2& a, const Point2& b, const Point2& c) {
  return cross(Vec2(b - a), Vec2(c - a));
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  const double d1 = segment_cross(q1, q2, p1), d2 = segment_cross(q1, q2, p2);
  const double d3 = segment_cross(p1, p2, q1), d4 = segment_cross(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Largest distance from a vertex of `a` to the nearest segment of `b`.
double directed_hausdorff(const Polyline& a, const Polyline& b) {
  double worst = 0.0;
  for (const auto& p : a.points) {
    double best = 1e300;
    for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
      const Vec2 d = b.points[k + 1] - b.points[k];
      const double t = std::clamp(Vec2(p - b.points[k]).dot(d) / d.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (b.points[k] + t * d - p).norm());
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("extremal points of analytic fields") {
  const GridSpec g{40, 10, {0.0, 2.0, 0.0, 1.0}};
  // Odd column count so a single column of centres sits on x = 1.
  const GridSpec odd{41, 10, {0.0, 2.0, 0.0, 1.0}};
  const FieldGrid p2 = sampled(odd, [](const Point2& p) { return (p.x() - 1) * (p.x() - 1); });
  const auto cells = extract_extremal_points(p2, ExtremumMode::trough, 0.5);
  REQUIRE(cells.size() == 10);
  for (const auto& c : cells) CHECK(c.i == 20);

  CHECK(extract_extremal_points(FieldGrid(g, 2.0), ExtremumMode::trough, 0.5).empty());
  CHECK(extract_extremal_points(FieldGrid(g, 2.0), ExtremumMode::ridge, 0.5).empty());

  const GridSpec c41{41, 8, {0.0, 2.0, 0.0, 1.0}};
  const FieldGrid cosine = sampled(c41, [](const Point2& p) { return std::cos(2 * oracle::pi * p.x()); });
  std::set<int> cols;
  for (const auto& c : extract_extremal_points(cosine, ExtremumMode::trough, 0.2)) cols.insert(c.i);
  // Cell centres (i + 0.5) * 2/41 nearest to x = 0.5 and x = 1.5.
  CHECK(cols == std::set<int>{10, 30});
  std::set<int> ridge_cols;
  for (const auto& c : extract_extremal_points(cosine, ExtremumMode::ridge, 0.2)) ridge_cols.insert(c.i);
  CHECK(ridge_cols == std::set<int>{20});
}

TEST_CASE("unit circle is traced as a closed curve") {
  const auto f = analytic([](const Point2& p) { return p.squaredNorm(); }, [](const Point2& p) { return Vec2(2 * p); });
  ContinuationSettings s;
  s.step = 0.01;
  s.tolerance = 1e-9;
  s.domain = {-2, 2, -2, 2};
  const Polyline c = continue_level_curve(f, {1.0, 0.0}, 1.0, s);
  CHECK(c.closed);
  CHECK(c.points.size() > 100);
  for (const auto& p : c.points) CHECK(std::abs(p.norm() - 1.0) <= 1e-3);
  CHECK(std::abs(c.length() - 2 * oracle::pi) <= 0.01);
}

TEST_CASE("straight level set exits the domain") {
  const auto f = analytic([](const Point2& p) { return p.y(); }, [](const Point2&) { return Vec2(0, 1); });
  ContinuationSettings s;
  s.step = 0.05;
  s.domain = {-1, 1, -1, 1};
  const Polyline c = continue_level_curve(f, {0.0, 0.0}, 0.0, s);
  CHECK_FALSE(c.closed);
  for (const auto& p : c.points) CHECK(std::abs(p.y()) <= 1e-12);
  const auto [lo, hi] = std::minmax({c.points.front().x(), c.points.back().x()});
  CHECK(lo <= -0.95);
  CHECK(hi >= 0.95);
}

TEST_CASE("continuation validates its seed") {
  const auto f = analytic([](const Point2& p) { return p.squaredNorm(); }, [](const Point2& p) { return Vec2(2 * p); });
  ContinuationSettings s;
  s.step = 0.01;
  s.domain = {-2, 2, -2, 2};
  CHECK_THROWS_AS(continue_level_curve(f, {0.5, 0.0}, 1.0, s), ConfigError);
  CHECK_THROWS_AS(continue_level_curve(f, {0.0, 0.0}, 0.0, s), NumericalError);
}

TEST_CASE("level curves of a sampled field stay on level and are simple") {
  const GridSpec g{64, 64, {-1.5, 1.5, -1.5, 1.5}};
  const FieldGrid bowl = sampled(g, [](const Point2& p) { return p.x() * p.x() + 2 * p.y() * p.y(); });
  const BicubicField interp(bowl);
  const ContinuationSettings s = continuation_for(bowl);
  const double range = field_stats(bowl).max - field_stats(bowl).min;
  Point2 seed(0.8, 0.0);
  REQUIRE(project_to_level(interp.as_function(), seed, 0.64, s, 0.1));
  const Polyline c = continue_level_curve(interp.as_function(), seed, 0.64, s);
  CHECK(c.closed);
  for (const auto& p : c.points) CHECK(std::abs(interp.value(p) - 0.64) <= 1e-3 * range);
  const auto& v = c.points;
  int crossings = 0;
  for (std::size_t a = 0; a + 1 < v.size(); ++a)
    for (std::size_t b = a + 2; b + 1 < v.size(); ++b)
      if (segments_intersect(v[a], v[a + 1], v[b], v[b + 1])) ++crossings;
  CHECK(crossings == 0);
}

TEST_CASE("continuation is reversible from the midpoint") {
  const GridSpec g{64, 32, {0.0, 2.0, 0.0, 1.0}};
  const FieldGrid wave = sampled(g, [](const Point2& p) { return p.y() - 0.2 * std::sin(3 * p.x()); });
  const BicubicField interp(wave);
  const ContinuationSettings s = continuation_for(wave);
  Point2 seed(1.0, 0.5);
  REQUIRE(project_to_level(interp.as_function(), seed, 0.4, s, 0.2));
  const Polyline c = continue_level_curve(interp.as_function(), seed, 0.4, s);
  REQUIRE_FALSE(c.closed);
  const Point2 mid = c.points[c.points.size() / 2];
  const Polyline again = continue_level_curve(interp.as_function(), mid, 0.4, s);
  CHECK(directed_hausdorff(c, again) <= s.step);
  CHECK(directed_hausdorff(again, c) <= s.step);
}

TEST_CASE("traced troughs follow the field level") {
  const GridSpec g{80, 40, {0.0, 2.0, 0.0, 1.0}};
  // A valley along a sine curve.
  const FieldGrid valley = sampled(g, [](const Point2& p) {
    const double d = p.y() - 0.5 - 0.15 * std::sin(2 * oracle::pi * p.x());
    return 1.0 + d * d + 0.01 * p.x();
  });
  const auto seeds = extract_extremal_points(valley, ExtremumMode::trough, 0.1);
  REQUIRE_FALSE(seeds.empty());
  const auto curves = trace_from_seeds(valley, seeds, CurveKind::ftc_trough, continuation_for(valley));
  REQUIRE_FALSE(curves.empty());
  const BicubicField interp(valley);
  for (const auto& c : curves) {
    CHECK(c.kind == CurveKind::ftc_trough);
    double mean = 0.0;
    for (const auto& p : c.points) mean += interp.value(p);
    mean /= static_cast<double>(c.points.size());
    CHECK(std::abs(mean - c.level) <= 0.02 * std::abs(c.level));
  }
}

TEST_CASE("double gyre trough stays near its level") {
  const auto dg = FlowSystem::double_gyre();
  FieldSettings fs;
  fs.probe.n_dirs = 16;
  const GridSpec g{48, 24, dg.bounds()};
  const FieldGrid ratio = compute_field(dg, {0.0, 10.0}, FieldKernel::ftc_ratio, g, fs);
  // The ratio spans many decades; level sets are traced on its logarithm.
  FieldGrid lr(g);
  for (std::size_t k = 0; k < ratio.size(); ++k) lr.set(k, std::log10(ratio.values()[k]));
  const auto seeds = extract_extremal_points(lr, ExtremumMode::trough, 0.1);
  REQUIRE_FALSE(seeds.empty());
  const BicubicField interp(lr);
  const ContinuationSettings s = continuation_for(lr);
  const GridCell seed = seeds.front();
  const double level = lr(seed.i, seed.j);
  const Polyline c = continue_level_curve(interp.as_function(), lr.cell_center(seed.i, seed.j), level, s);
  REQUIRE(c.points.size() >= 2);
  double mean = 0.0;
  for (const auto& p : c.points) mean += std::pow(10.0, interp.value(p));
  mean /= static_cast<double>(c.points.size());
  CHECK(std::abs(mean - std::pow(10.0, level)) <= 0.02 * std::pow(10.0, level));
}

TEST_CASE("zero-splitting curves of linear flows are empty") {
  const GridSpec g{16, 16, {-1, 1, -1, 1}};
  ZeroSplittingSettings s;
  s.field.kernel.integrator.guard_factor = 0.0;
  CHECK(zero_splitting_curves(FlowSystem::linear_saddle(1.0), {0.0, 1.0}, g, s).empty());
  s.field.max_invalid_fraction = 1.0;
  CHECK(zero_splitting_curves(FlowSystem::rigid_rotation(), {0.0, 1.0}, g, s).empty());
}

TEST_CASE("zero-splitting curves follow the sign change of the splitting angle") {
  // Synthetic signed angle crossing zero along x = 0.3.
  const GridSpec g{40, 20, {0.0, 1.0, 0.0, 0.5}};
  const FieldGrid theta = sampled(g, [](const Point2& p) { return 0.8 * std::tanh(4 * (p.x() - 0.3)); });
  const auto curves = zero_splitting_from_field(theta, 0.05);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].kind == CurveKind::zero_splitting);
  for (const auto& p : curves[0].points) CHECK(std::abs(p.x() - 0.3) <= 1e-3);
}

TEST_CASE("deduplication and distances") {
  Polyline a, b, c;
  for (int k = 0; k <= 10; ++k) {
    a.points.emplace_back(0.1 * k, 0.0);
    b.points.emplace_back(0.1 * k, 0.001);
    c.points.emplace_back(0.1 * k, 1.0);
  }
  const auto kept = deduplicate({a, b, c}, 0.01);
  REQUIRE(kept.size() == 2);
  CHECK(kept[1].points[0].y() == 1.0);
  CHECK(polyline_distance(a, c) == doctest::Approx(1.0));

  Polyline square;
  square.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  square.closed = true;
  CHECK(encloses(square, {0.5, 0.5}));
  CHECK_FALSE(encloses(square, {1.5, 0.5}));
}

TEST_CASE("polyline files round-trip") {
  Polyline a;
  a.points = {{0.1, 0.2}, {0.3, 0.4}, {1.0 / 3.0, 2e-17}};
  a.kind = CurveKind::ftle_ridge;
  a.level = 0.125;
  Polyline b;
  b.points = {{0, 0}, {1, 0}, {1, 1}, {0, 0}};
  b.closed = true;
  b.kind = CurveKind::ftc_trough;
  std::stringstream io;
  write_polylines(io, {a, b});
  CHECK(io.str().rfind("kind,level,closed\n", 0) == 0);
  const auto back = read_polylines(io);
  REQUIRE(back.size() == 2);
  CHECK(back[0].kind == CurveKind::ftle_ridge);
  CHECK(back[0].level == 0.125);
  CHECK(back[0].points == a.points);
  CHECK(back[1].closed);
  CHECK_THROWS_AS(parse_curve_kind("valley"), ConfigError);
}
