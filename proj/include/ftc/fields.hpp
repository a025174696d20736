#pragma once

#include "ftc/curvature.hpp"
#include "ftc/flows.hpp"
#include "ftc/integrate.hpp"
#include "ftc/spectral.hpp"
#include "ftc/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ftc {

/// Cell-centered rectangular sampling of a domain.
struct GridSpec {
  int nx = 2;
  int ny = 2;
  Bounds bounds;

  double dx() const { return bounds.width() / nx; }
  double dy() const { return bounds.height() / ny; }
  Point2 cell_center(int i, int j) const {
    return {bounds.x_min + (i + 0.5) * dx(), bounds.y_min + (j + 0.5) * dy()};
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  void validate() const;
};

/// Row-major scalar samples (row j holds y = const) with a validity mask.
class FieldGrid {
 public:
  FieldGrid() = default;
  explicit FieldGrid(const GridSpec& spec, double fill = 0.0);

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  const Bounds& bounds() const { return spec_.bounds; }
  double dx() const { return spec_.dx(); }
  double dy() const { return spec_.dy(); }
  std::size_t size() const { return values_.size(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(spec_.nx) +
           static_cast<std::size_t>(i);
  }
  Point2 cell_center(int i, int j) const { return spec_.cell_center(i, j); }

  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }
  bool valid(int i, int j) const { return valid_[index(i, j)] != 0; }
  bool valid(std::size_t k) const { return valid_[k] != 0; }
  void set_invalid(std::size_t k);
  void set(std::size_t k, double v);

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const std::uint8_t> mask() const { return valid_; }
  std::size_t invalid_count() const;

  /// ny x nx row-major view of the samples.
  Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  array() const {
    return {values_.data(), spec_.ny, spec_.nx};
  }

  std::map<std::string, std::string> meta;

 private:
  GridSpec spec_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

enum class FieldKernel { ftle, maxftc, minftc, ftc_ratio, theta, signed_theta };

std::string_view to_string(FieldKernel k);
FieldKernel parse_kernel(std::string_view name);

struct FieldSettings {
  KernelSettings kernel;
  ProbeSettings probe;
  /// Worker count; values never depend on it.
  int threads = 1;
  /// Fraction of failed cells above which compute_field aborts.
  double max_invalid_fraction = 0.2;
};

struct CellResult {
  enum class Status { ok, degenerate, failed };
  double value = 0.0;
  Status status = Status::ok;
  std::string error;
};

/// Kernel value at one point.
CellResult evaluate_point(const FlowSystem& flow, const Epoch& epoch, FieldKernel kernel,
                          const Point2& z, const FieldSettings& settings);

/// Kernel value at cell (i, j); this is exactly what compute_field stores.
CellResult evaluate_cell(const FlowSystem& flow, const Epoch& epoch, FieldKernel kernel,
                         const GridSpec& spec, int i, int j, const FieldSettings& settings);

/// Evaluates the kernel at every cell center. Failed and degenerate cells are masked.
/// Throws NumericalError when failed cells exceed settings.max_invalid_fraction.
FieldGrid compute_field(const FlowSystem& flow, const Epoch& epoch, FieldKernel kernel,
                        const GridSpec& spec, const FieldSettings& settings = {});

/// Runs `row_fn(j)` for every row, distributing rows over `threads` workers.
void for_each_row(int ny, int threads, const std::function<void(int)>& row_fn);

struct SliceTrace {
  Point2 start;
  Point2 end;
  std::vector<Point2> positions;
  /// NaN where any supporting cell is masked.
  std::vector<double> values;
};

/// Bilinear interpolation between cell centers; clamps to the outermost centers.
double sample_bilinear(const FieldGrid& field, const Point2& p);

SliceTrace slice(const FieldGrid& field, const Point2& start, const Point2& end, int n);

struct FieldStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  std::size_t valid = 0;
  std::size_t invalid = 0;
};

FieldStats field_stats(const FieldGrid& field);

/// Linear-interpolated quantile (type 7) of the valid samples.
double field_quantile(const FieldGrid& field, double q);

/// Metadata describing how a field was produced.
std::map<std::string, std::string> provenance(const FlowSystem& flow, const Epoch& epoch,
                                              FieldKernel kernel, const FieldSettings& settings);
/// 64-bit FNV-1a over the canonical `key=value\n` rendering of `meta`.
std::string settings_hash(const std::map<std::string, std::string>& meta);

/// Inverse of provenance(): rebuilds the inputs recorded in a field's metadata.
FlowSystem flow_from_meta(const std::map<std::string, std::string>& meta);
Epoch epoch_from_meta(const std::map<std::string, std::string>& meta);
FieldSettings settings_from_meta(const std::map<std::string, std::string>& meta);

}  // namespace ftc
