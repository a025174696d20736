#include "ftc/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftc {

ScalarFunction with_numeric_gradient(std::function<double(const Point2&)> f, double h) {
  ScalarFunction out;
  out.value = f;
  out.gradient = [f = std::move(f), h](const Point2& p) {
    const Vec2 ex(h, 0.0), ey(0.0, h);
    return Vec2((f(p + ex) - f(p - ex)) / (2 * h), (f(p + ey) - f(p - ey)) / (2 * h));
  };
  return out;
}

namespace {

void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t + 2 * t2 - t3);
  w[1] = 0.5 * (2 - 5 * t2 + 3 * t3);
  w[2] = 0.5 * (t + 4 * t2 - 3 * t3);
  w[3] = 0.5 * (-t2 + t3);
}

void catmull_rom_derivative(double t, double w[4]) {
  const double t2 = t * t;
  w[0] = 0.5 * (-1 + 4 * t - 3 * t2);
  w[1] = 0.5 * (-10 * t + 9 * t2);
  w[2] = 0.5 * (1 + 8 * t - 9 * t2);
  w[3] = 0.5 * (-2 * t + 3 * t2);
}

}  // namespace

BicubicField::BicubicField(FieldGrid field) : field_(std::move(field)) {}

template <bool Derivative>
void BicubicField::eval(const Point2& p, double* out) const {
  const auto& f = field_;
  const double fx = std::clamp((p.x() - f.bounds().x_min) / f.dx() - 0.5, 0.0, f.nx() - 1.0);
  const double fy = std::clamp((p.y() - f.bounds().y_min) / f.dy() - 0.5, 0.0, f.ny() - 1.0);
  const int i0 = std::min(static_cast<int>(std::floor(fx)), f.nx() - 2);
  const int j0 = std::min(static_cast<int>(std::floor(fy)), f.ny() - 2);
  const double tx = fx - i0, ty = fy - j0;

  double wx[4], wy[4], dwx[4], dwy[4];
  catmull_rom(tx, wx);
  catmull_rom(ty, wy);
  if constexpr (Derivative) {
    catmull_rom_derivative(tx, dwx);
    catmull_rom_derivative(ty, dwy);
  }
  double v = 0.0, gx = 0.0, gy = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int j = std::clamp(j0 - 1 + b, 0, f.ny() - 1);
    for (int a = 0; a < 4; ++a) {
      const int i = std::clamp(i0 - 1 + a, 0, f.nx() - 1);
      if (!f.valid(i, j)) {
        out[0] = out[1] = out[2] = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      const double s = f(i, j);
      v += wx[a] * wy[b] * s;
      if constexpr (Derivative) {
        gx += dwx[a] * wy[b] * s;
        gy += wx[a] * dwy[b] * s;
      }
    }
  }
  out[0] = v;
  out[1] = gx / f.dx();
  out[2] = gy / f.dy();
}

double BicubicField::value(const Point2& p) const {
  double out[3];
  eval<false>(p, out);
  return out[0];
}

Vec2 BicubicField::gradient(const Point2& p) const {
  double out[3];
  eval<true>(p, out);
  return {out[1], out[2]};
}

ScalarFunction BicubicField::as_function() const {
  return {[this](const Point2& p) { return value(p); },
          [this](const Point2& p) { return gradient(p); }};
}

}  // namespace ftc
