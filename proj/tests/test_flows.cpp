#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "ftc/errors.hpp"
#include "ftc/flows.hpp"

#include <bit>

using namespace ftc;

TEST_CASE("rigid rotation and saddle match their closed forms exactly") {
  const auto rot = FlowSystem::rigid_rotation();
  const Vec2 v = rot.velocity({1.0, 0.0}, 123.0);
  CHECK(v.x() == 0.0);
  CHECK(v.y() == 1.0);

  const auto saddle = FlowSystem::linear_saddle(1.7);
  auto gen = oracle::rng();
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Point2 z(u(gen), u(gen));
    const Vec2 r = rot.velocity(z, u(gen));
    CHECK(r.x() == -z.y());
    CHECK(r.y() == z.x());
    const Vec2 s = saddle.velocity(z, u(gen));
    CHECK(s.x() == 1.7 * z.x());
    CHECK(s.y() == -1.7 * z.y());
  }
}

TEST_CASE("double gyre x-velocity vanishes on y = 0") {
  const auto dg = FlowSystem::double_gyre();
  for (double x : {0.0, 0.3, 1.0, 1.7, 2.0}) CHECK(std::abs(dg.velocity({x, 0.0}, 0.0).x()) <= 1e-17);
}

TEST_CASE("double gyre velocity agrees with complex-step derivatives of H") {
  const auto dg = FlowSystem::double_gyre();
  const oracle::DoubleGyre H;
  const Vec2 ref = oracle::hamiltonian_velocity(H, 0.5, 0.5, 0.0);
  const Vec2 got = dg.velocity({0.5, 0.5}, 0.0);
  CHECK((got - ref).norm() <= 1e-14);

  auto gen = oracle::rng(7);
  std::uniform_real_distribution<double> ux(0.0, 2.0), uy(0.0, 1.0), ut(0.0, 20.0);
  for (int k = 0; k < 200; ++k) {
    const double x = ux(gen), y = uy(gen), t = ut(gen);
    CHECK((dg.velocity({x, y}, t) - oracle::hamiltonian_velocity(H, x, y, t)).norm() <= 1e-13);
  }
}

TEST_CASE("rossby velocity agrees with complex-step derivatives of H") {
  const auto rw = FlowSystem::rossby_wave();
  const oracle::Rossby H;
  const Vec2 ref = oracle::hamiltonian_velocity(H, 0.0, 0.0, 0.0);
  const Vec2 got = rw.velocity({0.0, 0.0}, 0.0);
  CHECK((got - ref).norm() <= 1e-9 * ref.norm());

  const Bounds b = rw.bounds();
  auto gen = oracle::rng(11);
  std::uniform_real_distribution<double> ux(b.x_min, b.x_max), uy(b.y_min, b.y_max), ut(0.0, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double x = ux(gen), y = uy(gen), t = ut(gen);
    const Vec2 r = oracle::hamiltonian_velocity(H, x, y, t);
    CHECK((rw.velocity({x, y}, t) - r).norm() <= 1e-10 * std::max(1.0, r.norm()));
  }
}

TEST_CASE("analytic velocity gradients agree with central differences") {
  for (const auto& flow : {FlowSystem::double_gyre(), FlowSystem::rossby_wave()}) {
    const Bounds b = flow.bounds();
    const double h = 1e-6 * b.width();
    auto gen = oracle::rng(3);
    std::uniform_real_distribution<double> ux(b.x_min, b.x_max), uy(b.y_min, b.y_max), ut(0.0, 10.0);
    for (int k = 0; k < 50; ++k) {
      const Point2 z(ux(gen), uy(gen));
      const double t = ut(gen);
      const Matrix2<double> G = flow.velocity_gradient(z, t);
      const Vec2 dx = (flow.velocity(z + Vec2(h, 0), t) - flow.velocity(z - Vec2(h, 0), t)) / (2 * h);
      const Vec2 dy = (flow.velocity(z + Vec2(0, h), t) - flow.velocity(z - Vec2(0, h), t)) / (2 * h);
      const double scale = std::max(1e-12, G.norm());
      CHECK((G.col(0) - dx).norm() <= 1e-6 * scale);
      CHECK((G.col(1) - dy).norm() <= 1e-6 * scale);
      CHECK(std::abs(G.trace()) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("hamiltonian flows are divergence-free at random samples") {
  const std::vector<FlowSystem> flows = {
      FlowSystem::double_gyre(), FlowSystem::rossby_wave(),
      FlowSystem::custom({{parse_term("0.3 sin 2 0.5 0 cos 1.5 0 0.2"), parse_term("-0.1 sech2 0.4 0 pow 2")}})};
  for (const auto& flow : flows) {
    const Bounds b = flow.bounds();
    const double h = 1e-5 * b.width();
    auto gen = oracle::rng(99);
    std::uniform_real_distribution<double> ux(b.x_min, b.x_max), uy(b.y_min, b.y_max), ut(0.0, 20.0);
    double worst = 0.0, speed = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Point2 z(ux(gen), uy(gen));
      const double t = ut(gen);
      const double div = (flow.velocity(z + Vec2(h, 0), t).x() - flow.velocity(z - Vec2(h, 0), t).x()) / (2 * h) +
                         (flow.velocity(z + Vec2(0, h), t).y() - flow.velocity(z - Vec2(0, h), t).y()) / (2 * h);
      worst = std::max(worst, std::abs(div));
      speed = std::max(speed, flow.velocity(z, t).norm());
    }
    // Divergence is measured in 1/time; relative to the flow's own rate scale.
    CHECK(worst <= 1e-5 * std::max(1.0, speed / b.width()));
  }
}

TEST_CASE("velocity is bit-reproducible") {
  const auto rw = FlowSystem::rossby_wave();
  const Vec2 a = rw.velocity({1234.5, -321.0}, 3.25);
  const Vec2 b = rw.velocity({1234.5, -321.0}, 3.25);
  CHECK(std::bit_cast<std::uint64_t>(a.x()) == std::bit_cast<std::uint64_t>(b.x()));
  CHECK(std::bit_cast<std::uint64_t>(a.y()) == std::bit_cast<std::uint64_t>(b.y()));
}

TEST_CASE("flow construction validates its parameters") {
  CHECK_THROWS_AS(FlowSystem::from_params(FlowKind::double_gyre, {{"A", -1.0}}), ConfigError);
  CHECK_THROWS_AS(FlowSystem::from_params(FlowKind::double_gyre, {{"epsilon", 0.5}}), ConfigError);
  CHECK_THROWS_AS(parse_flow_kind("triple_gyre"), ConfigError);
  try {
    FlowSystem::from_params(FlowKind::rigid_rotation, {{"bogus", 1.0}});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK(parse_flow_kind("double-gyre") == FlowKind::double_gyre);
  CHECK_THROWS_AS(FlowSystem::double_gyre().with_bounds({1.0, 0.0, 0.0, 1.0}), ConfigError);
}

TEST_CASE("non-finite velocity names the point and time") {
  const auto flow = FlowSystem::custom({{parse_term("1 pow -1 one")}});
  try {
    (void)flow.velocity({0.0, 0.5}, 2.0);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0.5") != std::string::npos);
    CHECK(msg.find("t=2") != std::string::npos);
  }
}

TEST_CASE("rossby defaults and overrides") {
  const auto rw = FlowSystem::rossby_wave();
  const auto& p = rw.params();
  CHECK(p.at("U0") == doctest::Approx(44.31));
  CHECK(p.at("c3") == doctest::Approx(0.462 * 44.31));
  CHECK(p.at("c2") == doctest::Approx(0.2055 * 44.31));
  CHECK(p.at("L") == 1770.0);
  CHECK(p.at("sigma1") == doctest::Approx(0.0).scale(1e-15));
  CHECK(rw.bounds().x_max == doctest::Approx(oracle::pi * 6371.0 * std::cos(oracle::pi / 6)));
  CHECK(rw.bounds().y_min == doctest::Approx(-2.5 * 1770.0));

  const auto lab = FlowSystem::from_params(FlowKind::rossby_wave, {{"sigma_comoving", 0.0}});
  const double k2 = 4.0 / (6371.0 * std::cos(oracle::pi / 6));
  CHECK(lab.params().at("sigma2") == doctest::Approx(k2 * 0.2055 * 44.31 * 86.4));

  // Rebuilding from the resolved parameters reproduces the flow exactly.
  auto resolved = rw.params();
  const auto again = FlowSystem::from_params(FlowKind::rossby_wave, resolved);
  for (double x : {0.0, 5000.0})
    CHECK(again.velocity({x, 800.0}, 4.0) == rw.velocity({x, 800.0}, 4.0));
}

TEST_CASE("custom hamiltonian terms parse, print and evaluate") {
  const HamiltonianTerm t = parse_term("0.1 cos 3.14159 0 0 cos 3.14159 0 0");
  CHECK(t.amplitude == 0.1);
  CHECK(parse_term(format_term(t)).x.a == t.x.a);
  CHECK_THROWS_AS(parse_term("0.1 cos 1"), ConfigError);
  CHECK_THROWS_AS(parse_term("0.1 wobble 1 one"), ConfigError);

  // H = x y: velocity (-x, y), a saddle.
  const auto flow = FlowSystem::custom({{parse_term("1 pow 1 pow 1")}});
  const Vec2 v = flow.velocity({2.0, 3.0}, 0.0);
  CHECK(v.x() == doctest::Approx(-2.0));
  CHECK(v.y() == doctest::Approx(3.0));
  CHECK(FlowSystem::identity().velocity({0.3, 0.4}, 1.0).norm() == 0.0);
}
