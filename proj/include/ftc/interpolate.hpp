#pragma once

#include "ftc/fields.hpp"
#include "ftc/types.hpp"

#include <functional>

namespace ftc {

/// Smooth scalar function of position with its gradient.
struct ScalarFunction {
  std::function<double(const Point2&)> value;
  std::function<Vec2(const Point2&)> gradient;
};

/// Gradient by central differences with step h.
ScalarFunction with_numeric_gradient(std::function<double(const Point2&)> f, double h);

/// C1 cubic-convolution (Catmull-Rom) interpolant of a cell-centered grid. Interpolates
/// the samples exactly at cell centers; edge samples are replicated outward. Returns
/// NaN when any supporting cell is masked.
class BicubicField {
 public:
  explicit BicubicField(FieldGrid field);

  double value(const Point2& p) const;
  Vec2 gradient(const Point2& p) const;
  const FieldGrid& grid() const { return field_; }

  ScalarFunction as_function() const;

 private:
  template <bool Derivative>
  void eval(const Point2& p, double* out) const;

  FieldGrid field_;
};

}  // namespace ftc
