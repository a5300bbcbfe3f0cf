#include "threadtrace/curve_search.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace threadtrace {

void SearchParams::validate() const {
  if (!(distance > 0.0)) throw ArgumentError("distance threshold must be positive");
  if (!(intensity > 0.0)) throw ArgumentError("intensity threshold must be positive");
}

CurveSegment::CurveSegment(std::vector<LinePoint> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  std::vector<double> values;
  values.reserve(points_.size());
  for (const LinePoint& p : points_) values.push_back(p.intensity);
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  mean_intensity_ = sum / static_cast<double>(values.size());
}

namespace {

bool earlier_in_raster_order(Vec2 a, Vec2 b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

// Uniform grid over the point set with removal support.
class PointIndex {
 public:
  PointIndex(std::span<const LinePoint> points, const SearchParams& params)
      : points_(points), params_(params), alive_(points.size(), 1), alive_count_(points.size()) {
    cell_of_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto key = cell_key(points[i].position);
      cell_of_.push_back(key);
      cells_[key].push_back(i);
    }
  }

  std::size_t alive_count() const { return alive_count_; }
  bool alive(std::size_t i) const { return alive_[i] != 0; }

  void remove(std::size_t i) {
    if (!alive_[i]) return;
    alive_[i] = 0;
    --alive_count_;
    auto& bucket = cells_[cell_of_[i]];
    bucket.erase(std::find(bucket.begin(), bucket.end(), i));
  }

  /// Calls fn(j) for every alive j != i within the distance threshold of i
  /// and the intensity threshold of `reference_intensity`.
  template <class Fn>
  void for_each_neighbor(std::size_t i, Fn&& fn) const {
    const LinePoint& p = points_[i];
    const double d2max = params_.distance * params_.distance;
    const auto [cx, cy] = cell_coords(p.position);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) {
          if (j == i) continue;
          const LinePoint& q = points_[j];
          if (squared_distance(q.position, p.position) > d2max) continue;
          if (std::abs(q.intensity - p.intensity) > params_.intensity) continue;
          fn(j);
        }
      }
    }
  }

  double polarity_of(std::size_t i) const {
    const LinePoint& p = points_[i];
    double sum = 0.0;
    std::size_t m = 0;
    for_each_neighbor(i, [&](std::size_t j) {
      sum += dot(points_[j].position - p.position, p.tangent);
      ++m;
    });
    return m == 0 ? kIsolatedPolarity : std::abs(sum / static_cast<double>(m));
  }

 private:
  std::pair<int, int> cell_coords(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / params_.distance)), static_cast<int>(std::floor(p.y / params_.distance))};
  }
  static std::int64_t pack(int cx, int cy) {
    return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
  }
  std::int64_t cell_key(Vec2 p) const {
    const auto [cx, cy] = cell_coords(p);
    return pack(cx, cy);
  }

  std::span<const LinePoint> points_;
  SearchParams params_;
  std::vector<char> alive_;
  std::size_t alive_count_;
  std::vector<std::int64_t> cell_of_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

std::size_t index_of(const LinePoint& p, std::span<const LinePoint> set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].position == p.position) return i;
  }
  throw ArgumentError("point is not a member of the set");
}

std::vector<std::size_t> grow_from(std::size_t seed, PointIndex& index, std::span<const LinePoint> points) {
  std::vector<std::size_t> collected{seed};
  index.remove(seed);
  std::size_t current = seed;
  for (;;) {
    std::size_t best = points.size();
    double best_d2 = 0.0, best_dv = 0.0;
    index.for_each_neighbor(current, [&](std::size_t j) {
      const double d2 = squared_distance(points[j].position, points[current].position);
      const double dv = std::abs(points[j].intensity - points[current].intensity);
      const bool better = best == points.size() || d2 < best_d2 || (d2 == best_d2 && dv < best_dv) ||
                          (d2 == best_d2 && dv == best_dv && earlier_in_raster_order(points[j].position, points[best].position));
      if (better) {
        best = j;
        best_d2 = d2;
        best_dv = dv;
      }
    });
    if (best == points.size()) break;
    index.remove(best);
    collected.push_back(best);
    current = best;
  }
  return collected;
}

CurveSegment make_segment(const std::vector<std::size_t>& indices, std::span<const LinePoint> points) {
  std::vector<LinePoint> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(points[i]);
  return CurveSegment(std::move(out));
}

}  // namespace

double polarity(const LinePoint& p, std::span<const LinePoint> set, const SearchParams& params) {
  params.validate();
  const double d2max = params.distance * params.distance;
  double sum = 0.0;
  std::size_t m = 0;
  for (const LinePoint& q : set) {
    if (q.position == p.position) continue;
    if (squared_distance(q.position, p.position) > d2max) continue;
    if (std::abs(q.intensity - p.intensity) > params.intensity) continue;
    sum += dot(q.position - p.position, p.tangent);
    ++m;
  }
  return m == 0 ? kIsolatedPolarity : std::abs(sum / static_cast<double>(m));
}

LinePoint most_salient_endpoint(std::span<const LinePoint> set, const SearchParams& params) {
  params.validate();
  if (set.empty()) throw ArgumentError("cannot pick an endpoint from an empty set");
  PointIndex index(set, params);
  std::size_t best = 0;
  double best_value = index.polarity_of(0);
  for (std::size_t i = 1; i < set.size(); ++i) {
    const double v = index.polarity_of(i);
    if (v > best_value || (v == best_value && earlier_in_raster_order(set[i].position, set[best].position))) {
      best = i;
      best_value = v;
    }
  }
  return set[best];
}

std::pair<CurveSegment, LinePointSet> grow_segment(const LinePoint& seed, const LinePointSet& set,
                                                   const SearchParams& params) {
  params.validate();
  const std::span<const LinePoint> points = set.points;
  PointIndex index(points, params);
  const std::vector<std::size_t> collected = grow_from(index_of(seed, points), index, points);
  LinePointSet remaining{{}, set.width, set.height};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (index.alive(i)) remaining.points.push_back(points[i]);
  }
  return {make_segment(collected, points), std::move(remaining)};
}

std::vector<CurveSegment> extract_segments(const LinePointSet& set, const SearchParams& params) {
  params.validate();
  const std::span<const LinePoint> points = set.points;
  std::vector<CurveSegment> segments;
  if (points.empty()) return segments;

  constexpr std::size_t kFullRefreshEvery = 16;
  PointIndex index(points, params);
  std::vector<double> pol(points.size());
  auto refresh_all = [&] {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (index.alive(i)) pol[i] = index.polarity_of(i);
    }
  };
  refresh_all();

  // Polarity only depends on neighbors within the distance threshold, so
  // after a removal only points near removed ones need recomputing.
  PointIndex all_points(points, SearchParams{params.distance, 2.0});  // intensity-agnostic spatial lookup
  std::vector<char> dirty(points.size(), 0);

  while (index.alive_count() > 0) {
    std::size_t seed = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!index.alive(i)) continue;
      if (seed == points.size() || pol[i] > pol[seed] ||
          (pol[i] == pol[seed] && earlier_in_raster_order(points[i].position, points[seed].position))) {
        seed = i;
      }
    }
    const std::vector<std::size_t> collected = grow_from(seed, index, points);
    segments.push_back(make_segment(collected, points));

    if (segments.size() % kFullRefreshEvery == 0) {
      refresh_all();
      continue;
    }
    std::vector<std::size_t> touched;
    for (std::size_t r : collected) {
      all_points.for_each_neighbor(r, [&](std::size_t j) {
        if (index.alive(j) && !dirty[j]) {
          dirty[j] = 1;
          touched.push_back(j);
        }
      });
    }
    for (std::size_t j : touched) {
      pol[j] = index.polarity_of(j);
      dirty[j] = 0;
    }
  }
  return segments;
}

}  // namespace threadtrace
