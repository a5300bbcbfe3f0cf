#include "threadtrace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <unordered_map>

namespace threadtrace {

void SceneConfig::validate() const {
  if (width <= 0 || height <= 0) throw ArgumentError("scene dimensions must be positive");
  if (!(thread_width >= 1.0)) throw ArgumentError("thread width must be >= 1");
  if (n_control_points < 4) throw ArgumentError("need at least 4 control points");
  if (min_self_intersections < 0 || min_self_intersections > max_self_intersections) {
    throw ArgumentError("self-intersection range must satisfy 0 <= min <= max");
  }
  if (occlusion_rects < 0 || occluder_size <= 0) throw ArgumentError("invalid occluder settings");
  if (!(noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<CenterlineSample> densify_polyline(std::span<const Vec2> vertices, double spacing) {
  if (vertices.size() < 2) throw ArgumentError("polyline needs at least 2 vertices");
  if (!(spacing > 0.0)) throw ArgumentError("spacing must be positive");
  std::vector<double> cumulative(vertices.size(), 0.0);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + distance(vertices[i - 1], vertices[i]);
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw ArgumentError("polyline has zero length");
  const auto n = static_cast<std::size_t>(std::ceil(total / spacing));
  std::vector<CenterlineSample> out;
  out.reserve(n + 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n);
    const double arc = s * total;
    while (seg + 2 < vertices.size() && cumulative[seg + 1] < arc) ++seg;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double f = len > 0.0 ? std::clamp((arc - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back({vertices[seg] + f * (vertices[seg + 1] - vertices[seg]), s});
  }
  out.front().position = vertices.front();
  out.back().position = vertices.back();
  return out;
}

namespace {

constexpr double kPassGap = 1.0;  // arclength jump (px) that starts a new pass over a pixel

// One pass of the thread over one pixel.
struct PassHit {
  std::size_t pixel = 0;
  int priority = 0;       // 0 occluded, 1 visible
  std::size_t order = 0;  // centerline index where the pass entered the pixel
  double coverage = 0.0;  // anti-aliased coverage in (0, 1]
  double s = 0.0;         // parameter of the nearest sample of the pass
};

struct Coverage {
  int width = 0;
  int height = 0;
  std::vector<PassHit> hits;  // grouped by pixel, in drawing order
};

std::vector<double> arclengths(std::span<const CenterlineSample> samples) {
  std::vector<double> out(samples.size(), 0.0);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    out[i] = out[i - 1] + distance(samples[i - 1].position, samples[i].position);
  }
  return out;
}

std::vector<int> sample_priorities(const SceneGroundTruth& gt) {
  std::vector<int> prio(gt.centerline.size(), 1);
  const std::size_t n = gt.occluded.size();
  if (n == 0) return prio;
  for (std::size_t i = 0; i < gt.centerline.size(); ++i) {
    const double s = std::clamp(gt.centerline[i].s, 0.0, 1.0);
    const auto key = static_cast<std::size_t>(std::lround(s * static_cast<double>(n - 1)));
    prio[i] = gt.occluded[key] ? 0 : 1;
  }
  return prio;
}

// Flat cross-section of width w with a 1 px linear anti-aliasing ramp.
double profile_coverage(double d, double w) { return std::clamp(0.5 * w + 0.5 - d, 0.0, 1.0); }

Coverage compute_coverage(const SceneGroundTruth& gt, double w) {
  if (gt.width <= 0 || gt.height <= 0) throw ArgumentError("ground truth has no frame dimensions");
  if (!(w > 0.0)) throw ArgumentError("thread width must be positive");
  const int width = gt.width;
  const int height = gt.height;
  const std::size_t npix = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  constexpr double kNone = -std::numeric_limits<double>::infinity();

  struct OpenPass {
    double last_arc = kNone;
    double best_d2 = 0.0;
    double s = 0.0;
    int priority = -1;
    std::size_t order = 0;
  };
  std::vector<OpenPass> open(npix);
  Coverage out{width, height, {}};

  auto close = [&](std::size_t p) {
    OpenPass& o = open[p];
    if (o.priority < 0) return;
    out.hits.push_back({p, o.priority, o.order, profile_coverage(std::sqrt(o.best_d2), w), o.s});
    o.priority = -1;
  };

  const std::vector<double> arc = arclengths(gt.centerline);
  const std::vector<int> prio = sample_priorities(gt);
  const double r = 0.5 * w + 0.5;
  const double r2 = r * r;
  for (std::size_t i = 0; i < gt.centerline.size(); ++i) {
    const Vec2 c = gt.centerline[i].position;
    const int x0 = std::max(0, static_cast<int>(std::ceil(c.x - r)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(c.x + r)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - r)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(c.y + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d2 = squared_distance({static_cast<double>(x), static_cast<double>(y)}, c);
        if (d2 >= r2) continue;
        const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
        OpenPass& o = open[p];
        if (arc[i] - o.last_arc > kPassGap) {
          close(p);
          o = {arc[i], d2, gt.centerline[i].s, prio[i], i};
        } else if (d2 < o.best_d2) {
          o.best_d2 = d2;
          o.s = gt.centerline[i].s;
          o.priority = prio[i];
        }
        o.last_arc = arc[i];
      }
    }
  }
  for (std::size_t p = 0; p < npix; ++p) close(p);
  // Occluded passes are drawn first; within a priority, in curve order.
  std::sort(out.hits.begin(), out.hits.end(), [](const PassHit& a, const PassHit& b) {
    if (a.pixel != b.pixel) return a.pixel < b.pixel;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.order < b.order;
  });
  return out;
}

template <class Fn>
void for_each_pixel_group(const Coverage& cov, Fn&& fn) {
  std::size_t i = 0;
  while (i < cov.hits.size()) {
    std::size_t j = i;
    while (j < cov.hits.size() && cov.hits[j].pixel == cov.hits[i].pixel) ++j;
    fn(cov.hits[i].pixel, std::span<const PassHit>(cov.hits.data() + i, j - i));
    i = j;
  }
}

// The pass whose parameter a pixel shows: the last drawn pass covering the
// pixel center, or else the one with the largest coverage.
const PassHit& owner(std::span<const PassHit> passes) {
  const PassHit* best = &passes.front();
  for (const PassHit& h : passes) {
    const bool center = h.coverage >= 0.5;
    const bool best_center = best->coverage >= 0.5;
    if (center || (!best_center && h.coverage >= best->coverage)) best = &h;
  }
  return *best;
}

GradientMap gradient_from_coverage(const Coverage& cov, bool conjugate) {
  ScalarField field(cov.width, cov.height, 0.0);
  auto dst = field.values();
  for_each_pixel_group(cov, [&](std::size_t p, std::span<const PassHit> passes) {
    double uncovered = 1.0;
    for (const PassHit& h : passes) uncovered *= 1.0 - h.coverage;
    const double s = std::clamp(conjugate ? 1.0 - owner(passes).s : owner(passes).s, 0.0, 1.0);
    dst[p] = std::clamp((1.0 - uncovered) * remap_parameter(s), 0.0, 1.0);
  });
  return GradientMap(std::move(field));
}

OverlapMap overlap_from_coverage(const Coverage& cov) {
  OverlapMap map(cov.width, cov.height, OverlapLabel::Background);
  auto dst = map.values();
  for_each_pixel_group(cov, [&](std::size_t p, std::span<const PassHit> passes) {
    dst[p] = passes.size() >= 2 ? OverlapLabel::Overlap : OverlapLabel::NonOverlap;
  });
  return map;
}

BinaryMask mask_from_coverage(const Coverage& cov) {
  BinaryMask mask(cov.width, cov.height, 0);
  auto dst = mask.values();
  for_each_pixel_group(cov, [&](std::size_t p, std::span<const PassHit>) { dst[p] = 1; });
  return mask;
}

// ---------------------------------------------------------------------------
// Curve geometry

struct Crossing {
  std::size_t first = 0;   // segment index along the curve
  std::size_t second = 0;  // later segment index
  Vec2 point;
  double angle = 0.0;  // acute angle between the strands, radians
};

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Half-open proper intersection of [a0,a1) and [b0,b1).
bool segment_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, Vec2& at) {
  const Vec2 da = a1 - a0;
  const Vec2 db = b1 - b0;
  const double denom = cross(da, db);
  if (denom == 0.0) return false;
  const Vec2 off = b0 - a0;
  const double t = cross(off, db) / denom;
  const double u = cross(off, da) / denom;
  if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0) return false;
  at = a0 + t * da;
  return true;
}

struct GridKeyHash {
  std::size_t operator()(std::int64_t k) const { return std::hash<std::int64_t>{}(k); }
};

std::int64_t grid_key(int cx, int cy) { return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy); }

std::vector<Crossing> find_crossings(std::span<const CenterlineSample> line) {
  std::vector<Crossing> out;
  if (line.size() < 4) return out;
  constexpr double kCell = 2.0;
  const std::size_t nseg = line.size() - 1;
  std::unordered_map<std::int64_t, std::vector<std::size_t>, GridKeyHash> grid;
  std::vector<std::pair<int, int>> cells(nseg);
  double max_len = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    const Vec2 mid = 0.5 * (line[i].position + line[i + 1].position);
    cells[i] = {static_cast<int>(std::floor(mid.x / kCell)), static_cast<int>(std::floor(mid.y / kCell))};
    grid[grid_key(cells[i].first, cells[i].second)].push_back(i);
    max_len = std::max(max_len, distance(line[i].position, line[i + 1].position));
  }
  const int reach = 1 + static_cast<int>(std::ceil(max_len / kCell));
  for (std::size_t i = 0; i < nseg; ++i) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        auto it = grid.find(grid_key(cells[i].first + dx, cells[i].second + dy));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i + 1) continue;
          Vec2 at;
          if (segment_intersection(line[i].position, line[i + 1].position, line[j].position, line[j + 1].position,
                                   at)) {
            const Vec2 da = line[i + 1].position - line[i].position;
            const Vec2 db = line[j + 1].position - line[j].position;
            const double c = std::abs(dot(da, db)) / (norm(da) * norm(db));
            out.push_back({i, j, at, std::acos(std::clamp(c, 0.0, 1.0))});
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
  return out;
}

// Clamped uniform cubic B-spline evaluated with de Boor's algorithm.
Vec2 bspline_point(std::span<const Vec2> ctrl, std::span<const double> knots, double u) {
  constexpr int p = 3;
  const int n = static_cast<int>(ctrl.size());
  int k = p;
  while (k < n - 1 && u >= knots[static_cast<std::size_t>(k + 1)]) ++k;
  Vec2 d[p + 1];
  for (int j = 0; j <= p; ++j) d[j] = ctrl[static_cast<std::size_t>(j + k - p)];
  for (int r = 1; r <= p; ++r) {
    for (int j = p; j >= r; --j) {
      const double lo = knots[static_cast<std::size_t>(j + k - p)];
      const double hi = knots[static_cast<std::size_t>(j + 1 + k - r)];
      const double a = hi > lo ? (u - lo) / (hi - lo) : 0.0;
      d[j] = (1.0 - a) * d[j - 1] + a * d[j];
    }
  }
  return d[p];
}

std::vector<Vec2> evaluate_bspline(std::span<const Vec2> ctrl, int per_span) {
  const int n = static_cast<int>(ctrl.size());
  const int spans = n - 3;
  std::vector<double> knots;
  for (int i = 0; i < 4; ++i) knots.push_back(0.0);
  for (int i = 1; i < spans; ++i) knots.push_back(static_cast<double>(i) / spans);
  for (int i = 0; i < 4; ++i) knots.push_back(1.0);
  const int total = spans * per_span;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(total) + 1);
  for (int i = 0; i <= total; ++i) {
    out.push_back(bspline_point(ctrl, knots, static_cast<double>(i) / total));
  }
  return out;
}

double circumradius(Vec2 a, Vec2 b, Vec2 c) {
  const double area2 = std::abs(cross(b - a, c - a));
  if (area2 == 0.0) return std::numeric_limits<double>::infinity();
  return distance(a, b) * distance(b, c) * distance(c, a) / (2.0 * area2);
}

struct AttemptResult {
  bool ok = false;
  int crossings = -1;
};

// Quality gates beyond the crossing count; see generate_scene docs.
bool acceptable_geometry(std::span<const CenterlineSample> line, std::span<const Crossing> crossings, double w) {
  const std::vector<double> arc = arclengths(line);
  const double total = arc.back();

  constexpr std::size_t kStride = 8;  // 2 px at the generator spacing
  for (std::size_t i = kStride; i + kStride < line.size(); i += 2) {
    if (circumradius(line[i - kStride].position, line[i].position, line[i + kStride].position) < 3.0 * w) return false;
  }

  constexpr double kMinAngle = 35.0 * std::numbers::pi / 180.0;
  const double end_clearance = 5.0 * w;
  for (const Crossing& c : crossings) {
    if (c.angle < kMinAngle) return false;
    if (std::abs(line[c.second].s - line[c.first].s) < 0.2) return false;
    for (std::size_t idx : {c.first, c.second}) {
      if (arc[idx] < end_clearance || arc[idx] > total - end_clearance) return false;
    }
  }

  // Strands may only come close to each other around a crossing.
  const double contact = 2.5 * w;
  const double crossing_zone = 6.0 * w;
  const double min_separation = 4.0 * w;
  std::unordered_map<std::int64_t, std::vector<std::size_t>, GridKeyHash> grid;
  auto cell_of = [&](Vec2 p) {
    return std::pair{static_cast<int>(std::floor(p.x / contact)), static_cast<int>(std::floor(p.y / contact))};
  };
  for (std::size_t i = 0; i < line.size(); i += 4) {
    auto [cx, cy] = cell_of(line[i].position);
    grid[grid_key(cx, cy)].push_back(i);
  }
  for (std::size_t i = 0; i < line.size(); i += 4) {
    auto [cx, cy] = cell_of(line[i].position);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        auto it = grid.find(grid_key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i || arc[j] - arc[i] <= min_separation) continue;
          if (squared_distance(line[i].position, line[j].position) >= contact * contact) continue;
          const bool near_crossing = std::any_of(crossings.begin(), crossings.end(), [&](const Crossing& c) {
            return distance(line[i].position, c.point) < crossing_zone &&
                   distance(line[j].position, c.point) < crossing_zone;
          });
          if (!near_crossing) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

int count_self_intersections(std::span<const CenterlineSample> centerline) {
  return static_cast<int>(find_crossings(centerline).size());
}

GradientMap render_gradient_map(const SceneGroundTruth& gt, double w) {
  return gradient_from_coverage(compute_coverage(gt, w), false);
}

GradientMap conjugate_ground_truth(const SceneGroundTruth& gt, double w) {
  return gradient_from_coverage(compute_coverage(gt, w), true);
}

OverlapMap render_overlap_map(const SceneGroundTruth& gt, double w) {
  return overlap_from_coverage(compute_coverage(gt, w));
}

BinaryMask render_mask(const SceneGroundTruth& gt, double w) { return mask_from_coverage(compute_coverage(gt, w)); }

SceneGroundTruth generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  constexpr int kMaxAttempts = 4000;
  const double w = cfg.thread_width;
  const double margin = std::max(6.0 * w, 24.0);
  const double lo_x = margin, hi_x = cfg.width - 1 - margin;
  const double lo_y = margin, hi_y = cfg.height - 1 - margin;
  if (hi_x <= lo_x || hi_y <= lo_y) throw ArgumentError("frame too small for the requested thread width");
  const double extent = std::min(hi_x - lo_x, hi_y - lo_y);
  const double max_turn = 125.0 * std::numbers::pi / 180.0;

  // Aim for a crossing count drawn uniformly from the range; accept any in-range count in the second half.
  std::mt19937_64 target_rng(mix_seed(cfg.seed, 0x7A26E7));
  const int target = std::uniform_int_distribution<int>(cfg.min_self_intersections,
                                                         cfg.max_self_intersections)(target_rng);
  int last_crossings = -1;
  int in_range_rejections = 0;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
    std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
    std::uniform_real_distribution<double> heading0(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> turn(-max_turn, max_turn);
    std::uniform_real_distribution<double> step(0.22 * extent, 0.36 * extent);
    std::bernoulli_distribution occluded_flag(0.3);

    std::vector<Vec2> ctrl;
    ctrl.push_back({ux(rng), uy(rng)});
    double heading = heading0(rng);
    for (int k = 1; k < cfg.n_control_points; ++k) {
      const Vec2 prev = ctrl.back();
      bool placed = false;
      for (int tries = 0; tries < 32 && !placed; ++tries) {
        const double h = heading + turn(rng);
        const double len = step(rng);
        const Vec2 next{prev.x + len * std::cos(h), prev.y + len * std::sin(h)};
        if (next.x >= lo_x && next.x <= hi_x && next.y >= lo_y && next.y <= hi_y) {
          ctrl.push_back(next);
          heading = h;
          placed = true;
        }
      }
      if (!placed) {
        const Vec2 center{0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)};
        heading = std::atan2(center.y - prev.y, center.x - prev.x);
        ctrl.push_back(prev + 0.5 * (center - prev));
      }
    }
    std::vector<bool> occluded;
    for (int k = 0; k < cfg.n_control_points; ++k) occluded.push_back(occluded_flag(rng));

    const std::vector<Vec2> dense = evaluate_bspline(ctrl, 400);
    std::vector<CenterlineSample> line = densify_polyline(dense, kCenterlineSpacing);
    const std::vector<Crossing> crossings = find_crossings(line);
    last_crossings = static_cast<int>(crossings.size());
    if (last_crossings < cfg.min_self_intersections || last_crossings > cfg.max_self_intersections) continue;
    if (attempt < kMaxAttempts / 2 && last_crossings != target) continue;
    if (!acceptable_geometry(line, crossings, w)) {
      ++in_range_rejections;
      continue;
    }

    SceneGroundTruth gt;
    gt.width = cfg.width;
    gt.height = cfg.height;
    gt.control_points = std::move(ctrl);
    gt.occluded = std::move(occluded);
    gt.centerline = std::move(line);
    const Coverage cov = compute_coverage(gt, w);
    gt.gradient = gradient_from_coverage(cov, false);
    gt.overlap = overlap_from_coverage(cov);
    gt.mask = mask_from_coverage(cov);
    return gt;
  }
  throw GenerationError("scene generation failed after " + std::to_string(kMaxAttempts) +
                        " attempts; last attempt had " + std::to_string(last_crossings) +
                        " self-intersections (wanted " + std::to_string(cfg.min_self_intersections) + ".." +
                        std::to_string(cfg.max_self_intersections) + "), " + std::to_string(in_range_rejections) +
                        " in-range candidates failed geometry checks");
}

GradientMap apply_degradation(const GradientMap& map, double noise_sigma, std::span<const PixelRect> occluders,
                              std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  ScalarField field = map.field();
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(mix_seed(seed, 0xD06));
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (double& v : field.values()) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }
  for (const PixelRect& r : occluders) {
    for (int y = std::max(0, r.y); y < std::min(field.height(), r.y + r.height); ++y) {
      for (int x = std::max(0, r.x); x < std::min(field.width(), r.x + r.width); ++x) field(x, y) = 0.0;
    }
  }
  return GradientMap(std::move(field));
}

std::vector<PixelRect> place_occluders(const SceneGroundTruth& gt, int count, int size, double margin,
                                       std::uint64_t seed) {
  if (count < 0 || size <= 0) throw ArgumentError("invalid occluder request");
  if (gt.centerline.empty()) throw ArgumentError("ground truth has no centerline");
  std::vector<PixelRect> out;
  std::mt19937_64 rng(mix_seed(seed, 0x0CC1));
  std::uniform_real_distribution<double> pick(0.2, 0.8);
  const Vec2 head = gt.centerline.front().position;
  const Vec2 tail = gt.centerline.back().position;
  for (int tries = 0; tries < 1000 && static_cast<int>(out.size()) < count; ++tries) {
    const double s = pick(rng);
    const auto it = std::lower_bound(gt.centerline.begin(), gt.centerline.end(), s,
                                     [](const CenterlineSample& c, double v) { return c.s < v; });
    const Vec2 c = (it == gt.centerline.end() ? gt.centerline.back() : *it).position;
    PixelRect r{static_cast<int>(std::lround(c.x)) - size / 2, static_cast<int>(std::lround(c.y)) - size / 2, size,
                size};
    r.x = std::clamp(r.x, 0, std::max(0, gt.width - size));
    r.y = std::clamp(r.y, 0, std::max(0, gt.height - size));
    const PixelRect guard{static_cast<int>(std::floor(r.x - margin)), static_cast<int>(std::floor(r.y - margin)),
                          static_cast<int>(std::ceil(size + 2 * margin)), static_cast<int>(std::ceil(size + 2 * margin))};
    if (guard.contains(head) || guard.contains(tail)) continue;
    out.push_back(r);
  }
  if (static_cast<int>(out.size()) < count) {
    throw GenerationError("could not place " + std::to_string(count) + " occluders away from the thread ends");
  }
  return out;
}

GradientMap apply_salt_noise(const GradientMap& map, double fraction, std::uint64_t seed) {
  return apply_salt_noise(map, BinaryMask(map.width(), map.height(), 0), fraction, seed);
}

GradientMap apply_salt_noise(const GradientMap& map, const BinaryMask& keep_clear, double fraction,
                             std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("salt fraction must lie in [0,1]");
  if (keep_clear.width() != map.width() || keep_clear.height() != map.height()) {
    throw ArgumentError("salt mask and map differ in size");
  }
  ScalarField field = map.field();
  auto values = field.values();
  auto clear = keep_clear.values();
  std::mt19937_64 rng(mix_seed(seed, 0x5A17));
  std::bernoulli_distribution hit(fraction);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (std::size_t p = 0; p < values.size(); ++p) {
    const bool salted = hit(rng);
    const double v = 1.0 - value(rng);
    if (salted && !clear[p]) values[p] = v;
  }
  return GradientMap(std::move(field));
}

}  // namespace threadtrace
