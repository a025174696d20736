#pragma once

#include "ftc/curves.hpp"
#include "ftc/fields.hpp"
#include "ftc/segmentation.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace ftc::app {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster written as binary PPM (P6).
class Image {
 public:
  Image(int width, int height, Rgb fill = {0, 0, 0});
  int width() const { return width_; }
  int height() const { return height_; }
  void set(int x, int y, Rgb c);
  Rgb at(int x, int y) const;
  void line(double x0, double y0, double x1, double y1, Rgb c);
  void write(const std::filesystem::path& path) const;

 private:
  int width_, height_;
  std::vector<std::uint8_t> px_;
};

enum class ColorScale { linear, log10 };

/// Perceptually ordered dark-blue to yellow ramp, t in [0, 1].
Rgb ramp(double t);

/// Heatmap with y increasing upward; masked cells gray. Pixel size chosen so the
/// image is at least `min_width` wide.
struct Raster {
  Image image;
  Bounds bounds;
  /// Pixel coordinates of a domain point.
  std::pair<double, double> to_pixel(const Point2& p) const;
};

Raster heatmap(const FieldGrid& field, ColorScale scale, int min_width = 512);
Raster label_map(const RegionPartition& partition, int min_width = 512);
void draw_polylines(Raster& r, const std::vector<Polyline>& curves, Rgb color);
void draw_segment(Raster& r, const Point2& a, const Point2& b, Rgb color);

/// Line chart of a slice trace, NaN samples left as gaps.
Image slice_chart(const SliceTrace& trace, bool log_scale, int width = 640, int height = 320);

}  // namespace ftc::app
