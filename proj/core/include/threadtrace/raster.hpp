#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "threadtrace/errors.hpp"

namespace threadtrace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
constexpr double squared_distance(Vec2 a, Vec2 b) {
  const Vec2 d = a - b;
  return d.x * d.x + d.y * d.y;
}

using Polyline = std::vector<Vec2>;

/// Dense row-major raster with top-left origin; pixel (x, y) has its center
/// at the continuous coordinate (x, y).
template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw ArgumentError("raster dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  template <class U>
  bool same_shape(const Raster<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ScalarField = Raster<double>;
using BinaryMask = Raster<std::uint8_t>;

enum class OverlapLabel : std::uint8_t { Background = 0, NonOverlap = 1, Overlap = 2 };
using OverlapMap = Raster<OverlapLabel>;

/// Scalar raster whose values all lie in [0, 1]. Thread pixels carry the
/// remapped arclength parameter of the thread, background is exactly 0.
class GradientMap {
 public:
  GradientMap() = default;
  explicit GradientMap(ScalarField field);
  GradientMap(int width, int height) : field_(width, height, 0.0) {}

  int width() const { return field_.width(); }
  int height() const { return field_.height(); }
  double operator()(int x, int y) const { return field_(x, y); }
  const ScalarField& field() const { return field_; }
  std::span<const double> values() const { return field_.values(); }

  friend bool operator==(const GradientMap&, const GradientMap&) = default;

 private:
  ScalarField field_;
};

// Rendered maps store s in [0,1] as 0.1 + 0.9 s so that 0 stays background.
inline constexpr double kParameterFloor = 0.1;

constexpr double remap_parameter(double s) { return kParameterFloor + (1.0 - kParameterFloor) * s; }

/// Inverse of remap_parameter, clamped to [0, 1]; background maps to 0.
inline double unremap_parameter(double value) {
  const double s = (value - kParameterFloor) / (1.0 - kParameterFloor);
  return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
}

/// Bilinear sample at a continuous coordinate; coordinates are clamped to the
/// pixel-center hull.
double sample_bilinear(const ScalarField& field, Vec2 at);

/// Align-corners bilinear resize: output corner pixels coincide with input
/// corner pixels.
ScalarField resize_bilinear(const ScalarField& field, int target_width, int target_height);

/// Indicator field of value > 0.
ScalarField presence(const ScalarField& field);

struct CenterlineSample {
  Vec2 position;
  double s = 0.0;

  friend bool operator==(const CenterlineSample&, const CenterlineSample&) = default;
};

struct SceneGroundTruth {
  int width = 0;
  int height = 0;
  std::vector<Vec2> control_points;
  std::vector<bool> occluded;
  GradientMap gradient;
  OverlapMap overlap;
  BinaryMask mask;
  std::vector<CenterlineSample> centerline;

  friend bool operator==(const SceneGroundTruth&, const SceneGroundTruth&) = default;
};

Polyline centerline_points(std::span<const CenterlineSample> samples);

}  // namespace threadtrace
