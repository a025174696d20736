#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>

namespace ftc {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Point2 = Vector2<double>;
using Vec2 = Vector2<double>;

/// Flow-map derivative DPhi. Column k holds the image of the k-th unit vector.
using Jacobian2 = Matrix2<double>;

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Bounds {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  Point2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  bool valid() const {
    return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
           std::isfinite(y_max) && x_min < x_max && y_min < y_max;
  }

  bool contains(const Point2& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }

  /// Same center, each side scaled by `factor`.
  Bounds scaled(double factor) const {
    const Point2 c = center();
    const double hw = 0.5 * width() * factor;
    const double hh = 0.5 * height() * factor;
    return {c.x() - hw, c.x() + hw, c.y() - hh, c.y() + hh};
  }
};

template <typename Scalar>
Vector2<Scalar> perp(const Vector2<Scalar>& v) {
  return {-v.y(), v.x()};
}

template <typename Scalar>
Scalar cross(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Matrix2<Scalar> rotation(Scalar angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(angle);
  const Scalar s = sin(angle);
  Matrix2<Scalar> r;
  r << c, -s, s, c;
  return r;
}

inline constexpr double kPi = std::numbers::pi;

}  // namespace ftc
