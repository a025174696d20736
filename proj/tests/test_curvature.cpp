#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "ftc/curvature.hpp"
#include "ftc/errors.hpp"

#include <algorithm>

using namespace ftc;

TEST_CASE("menger curvature matches the circumradius oracle") {
  CHECK(menger_curvature<double>({0, 0}, {2, 0}, {0, 2}) ==
        doctest::Approx(1.0 / oracle::circumradius({0, 0}, {2, 0}, {0, 2})));
  CHECK(menger_curvature<double>({0, 0}, {2, 0}, {0, 2}) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(menger_curvature<double>({0, 0}, {1, 0}, {2, 0}) == 0.0);
  CHECK(menger_curvature<double>({0, 0}, {1, 0}, {1, 1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(menger_curvature<double>({0, 0}, {0, 0}, {1, 1}), NumericalError);

  auto gen = oracle::rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const Point2 p(u(gen), u(gen)), q(u(gen), u(gen)), w(u(gen), u(gen));
    CHECK(menger_curvature(p, q, w) == doctest::Approx(1.0 / oracle::circumradius(p, q, w)).epsilon(1e-9));
  }
}

TEST_CASE("parametric curvature of analytic curves") {
  std::vector<Point2> circle;
  for (int k = -3; k <= 3; ++k) circle.emplace_back(2 * std::cos(k * 1e-3), 2 * std::sin(k * 1e-3));
  CHECK(std::abs(parametric_curvature(circle, 3) - 0.5) <= 1e-6);
  CHECK(std::abs(parametric_curvature(circle, 1) - 0.5) <= 1e-6);

  std::vector<Point2> parabola;
  for (int k = -2; k <= 2; ++k) parabola.emplace_back(k * 1e-3, k * 1e-3 * k * 1e-3);
  CHECK(std::abs(parametric_curvature(parabola, 2) - 2.0) <= 1e-5);

  const std::vector<Point2> line = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  CHECK(parametric_curvature(line, 2) == 0.0);

  const std::vector<Point2> stuck = {{1, 1}, {1, 1}, {1, 1}};
  CHECK_THROWS_AS(parametric_curvature(stuck, 1), NumericalError);
  CHECK_THROWS_AS(parametric_curvature(line, 0), ConfigError);
}

TEST_CASE("linear flows keep segments straight") {
  const Epoch e{0.0, 1.0};
  IntegratorSettings open;
  open.guard_factor = 0.0;
  for (const auto& flow : {FlowSystem::rigid_rotation(), FlowSystem::linear_saddle(1.0)}) {
    for (const Point2& z : {Point2(0.1, 0.2), Point2(-0.7, 0.4), Point2(0.9, -0.9)}) {
      const CurvatureTriple t = ftc_point(flow, z, e, {}, open);
      CHECK(t.C <= 1e-8);
      CHECK(t.c <= t.C);
      CHECK(std::abs(t.r - 1.0) <= 1e-6);
      for (const auto& d : ftc_direction_scan(flow, z, e, {}, open)) CHECK(d.kappa <= 1e-8);
    }
  }
}

namespace {

/// Richardson limit of C over eps, eps/2, eps/4; falls back to the finest value when the
/// sequence has already converged to rounding.
double refined_limit(double c1, double c2, double c4) {
  const double d1 = c1 - c2, d2 = c2 - c4;
  if (std::abs(d2) <= 1e-12 * std::abs(c4) || d1 / d2 <= 1.0) return c4;
  const double order = std::log2(d1 / d2);
  return c4 - d2 / (std::pow(2.0, order) - 1.0);
}

}  // namespace

TEST_CASE("double gyre maxFTC matches its epsilon-refinement limit") {
  const auto dg = FlowSystem::double_gyre();
  const Epoch e{0.0, 10.0};
  ProbeSettings p;
  p.n_dirs = 32;
  const auto C_at = [&](const Point2& z, double eps) {
    p.epsilon = eps;
    return ftc_point(dg, z, e, p).C;
  };
  // Generic points at the default probe scale, and the hyperbolic centre (1, 0.5) where the
  // radius of convergence is smaller and a finer eps is needed.
  const std::vector<std::pair<Point2, double>> cases = {
      {{0.4, 0.3}, 1e-4}, {{1.3, 0.7}, 1e-4}, {{1.0, 0.5}, 1e-5}};
  for (const auto& [z, eps] : cases) {
    const double c1 = C_at(z, eps), c2 = C_at(z, eps / 2), c4 = C_at(z, eps / 4);
    const double limit = refined_limit(c1, c2, c4);
    CAPTURE(z.x());
    CAPTURE(z.y());
    CHECK(c1 > 0.0);
    CHECK(std::abs(c1 - limit) <= 0.05 * std::abs(limit));
  }
}

TEST_CASE("direction scan is the sample set of ftc_point") {
  const auto dg = FlowSystem::double_gyre();
  const Epoch e{0.0, 10.0};
  for (const Point2& z : {Point2(0.4, 0.3), Point2(1.3, 0.8)}) {
    const auto scan = ftc_direction_scan(dg, z, e);
    const CurvatureTriple t = ftc_point(dg, z, e);
    REQUIRE(scan.size() == 32);
    double mx = 0.0, mn = 1e300;
    for (const auto& d : scan) {
      mx = std::max(mx, d.kappa);
      mn = std::min(mn, d.kappa);
    }
    CHECK(mx == t.C);
    CHECK(mn == t.c);
    CHECK(t.C >= t.c);
    CHECK(t.c >= 0.0);
    CHECK(t.r >= 1.0);
    CHECK(scan.front().angle == 0.0);
    CHECK(scan.back().angle < oracle::pi);
    CHECK(std::abs(t.dir_max.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("refinement never lowers the maximum and the five-point estimator agrees") {
  const auto dg = FlowSystem::double_gyre();
  const Epoch e{0.0, 10.0};
  const Point2 z(0.6, 0.4);
  const CurvatureTriple base = ftc_point(dg, z, e);
  ProbeSettings refined;
  refined.refine = true;
  const CurvatureTriple r = ftc_point(dg, z, e, refined);
  CHECK(r.C >= base.C);
  CHECK(r.c <= base.c);

  ProbeSettings five;
  five.n_probe = 5;
  five.estimator = CurvatureEstimator::parametric;
  const CurvatureTriple f = ftc_point(dg, z, e, five);
  CHECK(std::abs(f.C - base.C) <= 0.05 * base.C);
}

TEST_CASE("probe settings are validated") {
  ProbeSettings p;
  p.n_dirs = 2;
  CHECK_THROWS_AS(ftc_point(FlowSystem::double_gyre(), {1, 0.5}, {0.0, 1.0}, p), ConfigError);
  p = {};
  p.n_probe = 4;
  CHECK_THROWS_AS(ftc_point(FlowSystem::double_gyre(), {1, 0.5}, {0.0, 1.0}, p), ConfigError);
  p = {};
  p.epsilon = -1.0;
  CHECK_THROWS_AS(ftc_point(FlowSystem::double_gyre(), {1, 0.5}, {0.0, 1.0}, p), ConfigError);
  CHECK(parse_estimator("menger") == CurvatureEstimator::menger);
  CHECK_THROWS_AS(parse_estimator("spline"), ConfigError);
}

TEST_CASE("probe escapes surface as errors") {
  // Under the saddle with the default guard the probe leaves the box.
  CHECK_THROWS_AS(ftc_point(FlowSystem::linear_saddle(1.0), {0.5, 0.0}, {0.0, 10.0}), EscapeError);
}
