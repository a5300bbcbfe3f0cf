#include "threadtrace/raster.hpp"

#include <algorithm>
#include <string>

namespace threadtrace {

GradientMap::GradientMap(ScalarField field) : field_(std::move(field)) {
  if (field_.empty()) {
    throw ArgumentError("gradient map must have positive dimensions");
  }
  for (double v : field_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ArgumentError("gradient map value outside [0,1]: " + std::to_string(v));
    }
  }
}

double sample_bilinear(const ScalarField& field, Vec2 at) {
  const double x = std::clamp(at.x, 0.0, static_cast<double>(field.width() - 1));
  const double y = std::clamp(at.y, 0.0, static_cast<double>(field.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, field.width() - 1);
  const int y1 = std::min(y0 + 1, field.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * field(x0, y0) + fx * field(x1, y0);
  const double bottom = (1.0 - fx) * field(x0, y1) + fx * field(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

namespace {

// Source coordinate of destination index i under align-corners sampling.
double source_coordinate(int i, int source_extent, int target_extent) {
  if (target_extent == 1) {
    return 0.5 * (source_extent - 1);
  }
  return static_cast<double>(i) * (source_extent - 1) / (target_extent - 1);
}

}  // namespace

ScalarField resize_bilinear(const ScalarField& field, int target_width, int target_height) {
  if (target_width <= 0 || target_height <= 0) {
    throw ArgumentError("resize target dimensions must be positive");
  }
  if (field.empty()) {
    throw ArgumentError("cannot resize an empty field");
  }
  if (target_width == field.width() && target_height == field.height()) {
    return field;
  }
  ScalarField out(target_width, target_height);
  for (int y = 0; y < target_height; ++y) {
    const double sy = source_coordinate(y, field.height(), target_height);
    for (int x = 0; x < target_width; ++x) {
      const double sx = source_coordinate(x, field.width(), target_width);
      out(x, y) = sample_bilinear(field, {sx, sy});
    }
  }
  return out;
}

ScalarField presence(const ScalarField& field) {
  ScalarField out(field.width(), field.height());
  auto src = field.values();
  auto dst = out.values();
  std::transform(src.begin(), src.end(), dst.begin(), [](double v) { return v > 0.0 ? 1.0 : 0.0; });
  return out;
}

Polyline centerline_points(std::span<const CenterlineSample> samples) {
  Polyline out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back(s.position);
  }
  return out;
}

}  // namespace threadtrace
