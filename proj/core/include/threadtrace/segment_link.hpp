#pragma once

#include <span>
#include <vector>

#include "threadtrace/curve_search.hpp"

namespace threadtrace {

enum class Direction { Ascending, Descending };

/// Sign of the least-squares slope of intensity against collection index;
/// a zero slope counts as Ascending. Needs at least 2 points.
Direction segment_direction(const CurveSegment& segment);

struct LinkParams {
  int min_points = 14;  // t_c

  void validate() const;
};

struct OrderedThreadPoints {
  std::vector<LinePoint> points;                 // needle end (low) to tail end (high)
  std::vector<std::size_t> segment_boundaries;  // first index of every joined segment after the first
};

/// Drops segments shorter than min_points, orients the rest to ascending
/// intensity, sorts them by mean intensity and concatenates them.
///
/// Result is independent of input order and of the stored direction of each
/// segment. Throws EmptyLinkError when segments were given but none survived;
/// an empty input yields an empty result.
OrderedThreadPoints link_segments(std::span<const CurveSegment> segments, const LinkParams& params);

}  // namespace threadtrace
