#include "threadtrace/segment_link.hpp"

#include <algorithm>
#include <string>

namespace threadtrace {

void LinkParams::validate() const {
  if (min_points < 1) throw ArgumentError("minimum segment length must be >= 1");
}

namespace {

// Numerator of the least-squares slope, summed over mirrored index pairs so
// that reversing the sequence negates it exactly.
double slope_numerator(std::span<const LinePoint> points) {
  const std::size_t n = points.size();
  const double center = 0.5 * static_cast<double>(n - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    acc += (static_cast<double>(i) - center) * (points[i].intensity - points[n - 1 - i].intensity);
  }
  return acc;
}

double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

struct Prepared {
  std::vector<LinePoint> points;  // ascending orientation
  double mean = 0.0;
  Vec2 centroid;
};

bool lexicographically_less(const std::vector<LinePoint>& a, const std::vector<LinePoint>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const LinePoint& p, const LinePoint& q) {
    if (p.position.y != q.position.y) return p.position.y < q.position.y;
    if (p.position.x != q.position.x) return p.position.x < q.position.x;
    return p.intensity < q.intensity;
  });
}

Prepared prepare(const CurveSegment& segment) {
  Prepared out;
  out.points = segment.points();
  const double slope = slope_numerator(out.points);
  bool reverse = slope < 0.0;
  if (slope == 0.0) {
    // Flat intensity: fall back to a geometric orientation.
    const Vec2 a = out.points.front().position, b = out.points.back().position;
    reverse = a.y != b.y ? b.y < a.y : b.x < a.x;
  }
  if (reverse) std::reverse(out.points.begin(), out.points.end());
  out.mean = segment.mean_intensity();
  std::vector<double> xs, ys;
  for (const LinePoint& p : out.points) {
    xs.push_back(p.position.x);
    ys.push_back(p.position.y);
  }
  const auto n = static_cast<double>(out.points.size());
  out.centroid = {ordered_sum(std::move(xs)) / n, ordered_sum(std::move(ys)) / n};
  return out;
}

}  // namespace

Direction segment_direction(const CurveSegment& segment) {
  if (segment.size() < 2) throw ArgumentError("direction needs at least 2 points");
  return slope_numerator(segment.points()) < 0.0 ? Direction::Descending : Direction::Ascending;
}

OrderedThreadPoints link_segments(std::span<const CurveSegment> segments, const LinkParams& params) {
  params.validate();
  OrderedThreadPoints out;
  if (segments.empty()) return out;

  const auto min_points = static_cast<std::size_t>(std::max(params.min_points, 2));
  std::vector<Prepared> kept;
  for (const CurveSegment& s : segments) {
    if (s.size() >= min_points) kept.push_back(prepare(s));
  }
  if (kept.empty()) {
    throw EmptyLinkError("all " + std::to_string(segments.size()) + " segments are shorter than " +
                         std::to_string(min_points) + " points");
  }
  std::sort(kept.begin(), kept.end(), [](const Prepared& a, const Prepared& b) {
    if (a.mean != b.mean) return a.mean < b.mean;
    if (a.centroid.y != b.centroid.y) return a.centroid.y < b.centroid.y;
    if (a.centroid.x != b.centroid.x) return a.centroid.x < b.centroid.x;
    return lexicographically_less(a.points, b.points);
  });
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (k > 0) out.segment_boundaries.push_back(out.points.size());
    out.points.insert(out.points.end(), kept[k].points.begin(), kept[k].points.end());
  }
  return out;
}

}  // namespace threadtrace
