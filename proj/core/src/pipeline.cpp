#include "threadtrace/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "threadtrace/ridge.hpp"
#include "threadtrace/segment_link.hpp"

namespace threadtrace {

void PipelineConfig::validate() const {
  if (!(w > 0.0)) throw ArgumentError("w must be positive");
  if (!(t_l >= 0.0 && t_u >= t_l)) throw ArgumentError("thresholds must satisfy 0 <= t_l <= t_u");
  if (!(t_d > 0.0) || !(t_v > 0.0)) throw ArgumentError("t_d and t_v must be positive");
  if (t_c < 1) throw ArgumentError("t_c must be >= 1");
  if (!(mask_tolerance >= 0.0) || !(mask_threshold >= 0.0)) throw ArgumentError("mask thresholds must be >= 0");
  if (!(smoothing >= 0.0)) throw ArgumentError("smoothing must be >= 0");
  if (n_samples < 2) throw ArgumentError("n_samples must be >= 2");
}

FusedMaps fuse_conjugate(const GradientMap& g, const GradientMap& g_conj, const PipelineConfig& cfg) {
  if (g.width() != g_conj.width() || g.height() != g_conj.height()) {
    throw ArgumentError("gradient and conjugate maps differ in size");
  }
  ScalarField clean = g.field();
  ScalarField clean_conj = g_conj.field();
  ScalarField gray(g.width(), g.height(), 0.0);
  BinaryMask mask(g.width(), g.height(), 0);
  std::size_t removed = 0;
  auto a = clean.values();
  auto b = clean_conj.values();
  auto out = gray.values();
  auto m = mask.values();
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (!(a[p] + b[p] > cfg.mask_threshold)) {
      out[p] = std::min(a[p] + b[p], 1.0);
      continue;
    }
    if (std::abs(unremap_parameter(a[p]) + unremap_parameter(b[p]) - 1.0) > cfg.mask_tolerance) {
      a[p] = 0.0;
      b[p] = 0.0;
      ++removed;
      continue;
    }
    m[p] = 1;
    out[p] = std::min(a[p] + b[p], 1.0);
  }
  return {GradientMap(std::move(clean)), GradientMap(std::move(clean_conj)), std::move(gray), std::move(mask), removed};
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Ordering values and the thread coverage they are normalized by.
struct Ordering {
  const ScalarField& values;
  ScalarField coverage;
};

Ordering single_ordering(const GradientMap& g) { return {g.field(), presence(g.field())}; }

Ordering fused_ordering(const FusedMaps& fused) {
  // A consistent pair sums to remap(s) + remap(1 - s) = 1 + floor times the coverage.
  ScalarField coverage(fused.gray.width(), fused.gray.height(), 0.0);
  auto a = fused.denoised.field().values();
  auto b = fused.denoised_conjugate.field().values();
  auto c = coverage.values();
  for (std::size_t p = 0; p < c.size(); ++p) c[p] = (a[p] + b[p]) / (1.0 + kParameterFloor);
  return {fused.denoised.field(), std::move(coverage)};
}

// Ridges continue a little past the rounded thread ends; such points are not on the thread.
constexpr double kMinCoverage = 0.75;

LinePointSet ridge_points(const ScalarField& gray, const Ordering& ordering, const PipelineConfig& cfg) {
  LinePointSet points = extract_line_points(gray, {sigma_from_width(cfg.w), cfg.t_l, cfg.t_u});
  std::erase_if(points.points, [&](const LinePoint& p) {
    return sample_bilinear(ordering.coverage, p.position) < kMinCoverage;
  });
  resample_intensity(points, ordering.values, ordering.coverage);
  return points;
}

ReconstructionResult trace(ScalarField gray, const Ordering& ordering, const PipelineConfig& cfg,
                           StageTimings timings) {
  ReconstructionResult result;
  result.timings = timings;
  auto t0 = Clock::now();
  const LinePointSet points = ridge_points(gray, ordering, cfg);
  result.timings.ridge_ms = elapsed_ms(t0);
  result.fused_field = std::move(gray);

  t0 = Clock::now();
  result.segments = extract_segments(points, {cfg.t_d, cfg.t_v});
  result.timings.search_ms = elapsed_ms(t0);

  t0 = Clock::now();
  OrderedThreadPoints ordered;
  try {
    ordered = link_segments(result.segments, {cfg.t_c});
  } catch (const EmptyLinkError& e) {
    result.failure = std::string("no thread detected: ") + e.what();
  }
  result.timings.link_ms = elapsed_ms(t0);
  if (!result.failure.empty()) return result;
  if (ordered.points.empty()) {
    result.failure = "no thread detected: no line points";
    return result;
  }

  t0 = Clock::now();
  Polyline path;
  path.reserve(ordered.points.size());
  for (const LinePoint& p : ordered.points) {
    if (path.empty() || distance(path.back(), p.position) > 0.0) path.push_back(p.position);
  }
  if (path.size() < 4) {
    result.failure = "no thread detected: fewer than 4 linked points";
    result.timings.fit_ms = elapsed_ms(t0);
    return result;
  }
  result.spline = fit_spline(path, cfg.smoothing);
  result.sampled = sample(result.spline, cfg.n_samples);
  result.fitted_points = path.size();
  result.detected = true;
  result.timings.fit_ms = elapsed_ms(t0);
  return result;
}

void finish_timings(StageTimings& t) { t.total_ms = t.fuse_ms + t.ridge_ms + t.search_ms + t.link_ms + t.fit_ms; }

}  // namespace

ReconstructionResult reconstruct(const GradientMap& g, const PipelineConfig& cfg) {
  cfg.validate();
  StageTimings timings;
  const auto t0 = Clock::now();
  ScalarField gray = presence(g.field());
  const Ordering ordering = single_ordering(g);
  timings.fuse_ms = elapsed_ms(t0);
  ReconstructionResult result = trace(std::move(gray), ordering, cfg, timings);
  finish_timings(result.timings);
  return result;
}

ReconstructionResult reconstruct(const GradientMap& g, const GradientMap& g_conj, const PipelineConfig& cfg) {
  cfg.validate();
  StageTimings timings;
  const auto t0 = Clock::now();
  FusedMaps fused = fuse_conjugate(g, g_conj, cfg);
  const Ordering ordering = fused_ordering(fused);
  timings.fuse_ms = elapsed_ms(t0);
  ReconstructionResult result = trace(std::move(fused.gray), ordering, cfg, timings);
  finish_timings(result.timings);
  return result;
}

LinePointSet thread_line_points(const GradientMap& g, const GradientMap& g_conj, const PipelineConfig& cfg) {
  cfg.validate();
  const FusedMaps fused = fuse_conjugate(g, g_conj, cfg);
  return ridge_points(fused.gray, fused_ordering(fused), cfg);
}

RgbImage render_overlay(const ScalarField& background, const Polyline& sampled) {
  RgbImage image(background.width(), background.height());
  auto src = background.values();
  auto dst = image.values();
  for (std::size_t p = 0; p < src.size(); ++p) {
    const auto v = static_cast<std::uint8_t>(std::lround(std::clamp(src[p], 0.0, 1.0) * 96.0));
    dst[p] = {v, v, v};
  }
  constexpr Rgb kNeedle{40, 120, 255};
  constexpr Rgb kTail{255, 150, 20};
  const std::size_t n = sampled.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    auto mix = [f](std::uint8_t a, std::uint8_t b) {
      return static_cast<std::uint8_t>(std::lround((1.0 - f) * a + f * b));
    };
    const Rgb color{mix(kNeedle.r, kTail.r), mix(kNeedle.g, kTail.g), mix(kNeedle.b, kTail.b)};
    const int cx = static_cast<int>(std::lround(sampled[i].x));
    const int cy = static_cast<int>(std::lround(sampled[i].y));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (image.contains(cx + dx, cy + dy)) image(cx + dx, cy + dy) = color;
      }
    }
  }
  return image;
}

}  // namespace threadtrace
