#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "threadtrace/ridge.hpp"

namespace threadtrace {

struct SearchParams {
  double distance = 2.0;   // t_d, pixels
  double intensity = 0.1;  // t_v, intensity units

  void validate() const;
};

/// Polarity of a point with no qualifying neighbors.
inline constexpr double kIsolatedPolarity = std::numeric_limits<double>::infinity();

class CurveSegment {
 public:
  CurveSegment() = default;
  explicit CurveSegment(std::vector<LinePoint> points);

  const std::vector<LinePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  /// Arithmetic mean of the point intensities, independent of point order.
  double mean_intensity() const { return mean_intensity_; }

  friend bool operator==(const CurveSegment&, const CurveSegment&) = default;

 private:
  std::vector<LinePoint> points_;
  double mean_intensity_ = 0.0;
};

/// |mean over neighbors of (x_i - x) . tangent|, where neighbors lie within
/// params.distance in space and params.intensity in value (both inclusive).
/// Returns kIsolatedPolarity when there are none. `p` is matched by position.
double polarity(const LinePoint& p, std::span<const LinePoint> set, const SearchParams& params);

/// Point of maximal polarity; ties go to the lowest y, then lowest x.
LinePoint most_salient_endpoint(std::span<const LinePoint> set, const SearchParams& params);

/// Greedy region growing from `seed`: repeatedly takes the nearest remaining
/// point within both thresholds of the current point (ties: smaller intensity
/// difference, then lower y, then lower x).
std::pair<CurveSegment, LinePointSet> grow_segment(const LinePoint& seed, const LinePointSet& set,
                                                   const SearchParams& params);

/// Alternates most_salient_endpoint and grow_segment until no point remains.
/// The segments partition the input.
std::vector<CurveSegment> extract_segments(const LinePointSet& set, const SearchParams& params);

}  // namespace threadtrace
