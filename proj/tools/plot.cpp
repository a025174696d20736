#include "plot.hpp"

#include "ftc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace ftc::app {

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height), px_(static_cast<std::size_t>(width) * height * 3) {
  if (width < 1 || height < 1) throw ConfigError("image size must be positive");
  for (std::size_t k = 0; k < px_.size(); k += 3) std::copy(fill.begin(), fill.end(), px_.begin() + k);
}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  std::copy(c.begin(), c.end(), px_.begin() + (static_cast<std::size_t>(y) * width_ + x) * 3);
}

Rgb Image::at(int x, int y) const {
  const auto k = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {px_[k], px_[k + 1], px_[k + 2]};
}

void Image::line(double x0, double y0, double x1, double y1, Rgb c) {
  const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int n = std::max(1, static_cast<int>(std::ceil(len)));
  if (n > 1'000'000) return;
  for (int k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    set(static_cast<int>(std::floor(x0 + s * (x1 - x0))), static_cast<int>(std::floor(y0 + s * (y1 - y0))), c);
  }
}

void Image::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << "P6\n" << width_ << ' ' << height_ << "\n255\n";
  out.write(reinterpret_cast<const char*>(px_.data()), static_cast<std::streamsize>(px_.size()));
  if (!out) throw Error("failed writing image '" + path.string() + "'");
}

Rgb ramp(double t) {
  // Stops sampled from a viridis-like ramp.
  static constexpr double stops[][3] = {
      {68, 1, 84},    {72, 40, 120},  {62, 74, 137},  {49, 104, 142}, {38, 130, 142},
      {31, 158, 137}, {53, 183, 121}, {109, 205, 89}, {180, 222, 44}, {253, 231, 37},
  };
  constexpr int n = sizeof stops / sizeof stops[0];
  if (!std::isfinite(t)) t = 0.0;
  const double x = std::clamp(t, 0.0, 1.0) * (n - 1);
  const int a = std::min(static_cast<int>(x), n - 2);
  const double f = x - a;
  Rgb c;
  for (int k = 0; k < 3; ++k)
    c[k] = static_cast<std::uint8_t>(std::lround(stops[a][k] + f * (stops[a + 1][k] - stops[a][k])));
  return c;
}

std::pair<double, double> Raster::to_pixel(const Point2& p) const {
  const double u = (p.x() - bounds.x_min) / bounds.width() * image.width();
  const double v = (bounds.y_max - p.y()) / bounds.height() * image.height();
  return {u, v};
}

namespace {

int pixel_scale(int nx, int min_width) { return std::max(1, (min_width + nx - 1) / nx); }

template <typename ColorFn>
Raster paint(const GridSpec& spec, int min_width, ColorFn&& color) {
  const int s = pixel_scale(spec.nx, min_width);
  Raster r{Image(spec.nx * s, spec.ny * s), spec.bounds};
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) {
      const Rgb c = color(i, j);
      const int y0 = (spec.ny - 1 - j) * s;
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx) r.image.set(i * s + dx, y0 + dy, c);
    }
  return r;
}

}  // namespace

Raster heatmap(const FieldGrid& field, ColorScale scale, int min_width) {
  auto mapped = [scale](double v) {
    if (scale == ColorScale::log10) return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
    return v;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (!field.valid(k)) continue;
    const double m = mapped(field.values()[k]);
    if (!std::isfinite(m)) continue;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  return paint(field.spec(), min_width, [&](int i, int j) -> Rgb {
    if (!field.valid(i, j)) return {128, 128, 128};
    const double m = mapped(field(i, j));
    if (!std::isfinite(m)) return {128, 128, 128};
    return ramp((m - lo) / span);
  });
}

Raster label_map(const RegionPartition& partition, int min_width) {
  return paint(partition.spec, min_width, [&](int i, int j) -> Rgb {
    const int l = partition.label(i, j);
    if (l == 0) return {0, 0, 0};
    // Golden-ratio hue walk keeps neighboring labels distinguishable.
    const double h = std::fmod(0.618033988749895 * l, 1.0);
    return ramp(0.15 + 0.85 * h);
  });
}

void draw_segment(Raster& r, const Point2& a, const Point2& b, Rgb color) {
  const auto [x0, y0] = r.to_pixel(a);
  const auto [x1, y1] = r.to_pixel(b);
  r.image.line(x0, y0, x1, y1, color);
}

void draw_polylines(Raster& r, const std::vector<Polyline>& curves, Rgb color) {
  for (const auto& c : curves) {
    for (std::size_t k = 1; k < c.points.size(); ++k) draw_segment(r, c.points[k - 1], c.points[k], color);
    if (c.closed && c.points.size() > 2) draw_segment(r, c.points.back(), c.points.front(), color);
  }
}

Image slice_chart(const SliceTrace& trace, bool log_scale, int width, int height) {
  Image img(width, height, {255, 255, 255});
  const std::size_t n = trace.values.size();
  std::vector<double> v(n);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = trace.values[k];
    if (log_scale) v[k] = v[k] > 0.0 ? std::log10(v[k]) : std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(v[k])) {
      lo = std::min(lo, v[k]);
      hi = std::max(hi, v[k]);
    }
  }
  const int margin = 10;
  const Rgb axis{160, 160, 160}, ink{200, 30, 30};
  img.line(margin, height - margin, width - margin, height - margin, axis);
  img.line(margin, margin, margin, height - margin, axis);
  if (!(hi >= lo) || n < 2) return img;
  const double span = hi > lo ? hi - lo : 1.0;
  auto px = [&](std::size_t k) {
    return std::pair<double, double>{margin + (width - 2.0 * margin) * k / (n - 1.0),
                                     height - margin - (height - 2.0 * margin) * (v[k] - lo) / span};
  };
  for (std::size_t k = 1; k < n; ++k) {
    if (!std::isfinite(v[k - 1]) || !std::isfinite(v[k])) continue;
    const auto [x0, y0] = px(k - 1);
    const auto [x1, y1] = px(k);
    img.line(x0, y0, x1, y1, ink);
  }
  return img;
}

}  // namespace ftc::app
