#pragma once

#include <array>
#include <span>
#include <vector>

#include "threadtrace/raster.hpp"
#include "threadtrace/segment_link.hpp"

namespace threadtrace {

/// Cubic on one knot interval: a + b u + c u^2 + d u^3 with u = t - knot.
using CubicPiece = std::array<double, 4>;

/// Per-coordinate piecewise cubic over a parameter in [0, 1].
class ThreadSpline {
 public:
  ThreadSpline() = default;
  ThreadSpline(std::vector<double> knots, std::vector<CubicPiece> cx, std::vector<CubicPiece> cy);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<CubicPiece>& coeffs_x() const { return cx_; }
  const std::vector<CubicPiece>& coeffs_y() const { return cy_; }
  bool empty() const { return cx_.empty(); }

  Vec2 evaluate(double t) const;
  Vec2 derivative(double t) const;
  Vec2 second_derivative(double t) const;

  /// Integral over [0,1] of |S''(t)|^2, summed over both coordinates.
  double roughness() const;

  friend bool operator==(const ThreadSpline&, const ThreadSpline&) = default;

 private:
  std::size_t interval(double t) const;

  std::vector<double> knots_;
  std::vector<CubicPiece> cx_, cy_;
};

/// Chord-length parameterized cubic spline through (smoothing == 0) or near
/// (smoothing > 0) the points, with natural end conditions.
///
/// `smoothing` weights the integrated squared second derivative against the
/// squared residuals, with derivatives taken per pixel of arclength, so that
/// the weight does not depend on the thread length. Needs >= 4 points and no
/// coincident neighbors.
ThreadSpline fit_spline(std::span<const Vec2> points, double smoothing);
ThreadSpline fit_spline(const OrderedThreadPoints& points, double smoothing);

/// n points at uniform parameter spacing over [0, 1]; n >= 2.
Polyline sample(const ThreadSpline& spline, int n);

}  // namespace threadtrace
