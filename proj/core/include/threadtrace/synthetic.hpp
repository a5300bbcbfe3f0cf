#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "threadtrace/raster.hpp"

namespace threadtrace {

struct SceneConfig {
  int width = 512;
  int height = 384;
  double thread_width = 4.0;
  int n_control_points = 8;
  int min_self_intersections = 0;
  int max_self_intersections = 2;
  int occlusion_rects = 0;
  int occluder_size = 40;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Centerline sample spacing used by the generator, in pixels.
inline constexpr double kCenterlineSpacing = 0.25;

/// Random smooth open thread with exact ground truth. Pure function of cfg.
///
/// The crossing count is drawn uniformly from the configured range, so a
/// [0, 2] range yields a real mix of simple and self-crossing threads. Besides
/// the crossing count, accepted curves satisfy: turning radius
/// >= 3 w, crossing angles >= 35 degrees, crossing strands at least 0.2 apart
/// in parameter, and no near-contact between strands away from a crossing.
/// Degradation (noise, occluders) is not applied here; see apply_degradation.
SceneGroundTruth generate_scene(const SceneConfig& cfg);

/// Each pass of the thread over a pixel has coverage clamp(w/2 + 0.5 - d, 0, 1),
/// d being the distance from the pixel center to the pass. A pixel shows
/// (1 - prod(1 - coverage)) * remap_parameter(s) where s belongs to the owning
/// pass: the last drawn pass that covers the pixel center (occluded passes are
/// drawn first, then curve order), else the pass with the largest coverage.
/// Parameters of different passes are never blended.
GradientMap render_gradient_map(const SceneGroundTruth& gt, double w);

/// Same ownership as render_gradient_map with s replaced by 1 - s.
GradientMap conjugate_ground_truth(const SceneGroundTruth& gt, double w);

/// Overlap where two or more passes have nonzero coverage.
OverlapMap render_overlap_map(const SceneGroundTruth& gt, double w);

/// Pixels with nonzero coverage; equals (render_gradient_map > 0).
BinaryMask render_mask(const SceneGroundTruth& gt, double w);

struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(Vec2 p) const {
    return p.x >= x - 0.5 && p.x < x + width - 0.5 && p.y >= y - 0.5 && p.y < y + height - 0.5;
  }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Additive Gaussian noise (clamped to [0,1]) followed by zeroing of every
/// rectangle. Deterministic per seed.
GradientMap apply_degradation(const GradientMap& map, double noise_sigma, std::span<const PixelRect> occluders,
                              std::uint64_t seed);

/// Square occluders centered on the thread body that keep at least `margin`
/// pixels away from both thread ends.
std::vector<PixelRect> place_occluders(const SceneGroundTruth& gt, int count, int size, double margin,
                                       std::uint64_t seed);

/// Replaces a `fraction` of pixels with uniform random values in (0, 1].
GradientMap apply_salt_noise(const GradientMap& map, double fraction, std::uint64_t seed);

/// Same, but pixels set in `keep_clear` are left untouched. The random stream
/// does not depend on the mask.
GradientMap apply_salt_noise(const GradientMap& map, const BinaryMask& keep_clear, double fraction,
                             std::uint64_t seed);

/// Proper crossings between non-adjacent segments of the sampled centerline.
int count_self_intersections(std::span<const CenterlineSample> centerline);

/// Resamples a polyline at (at most) `spacing` arclength and attaches the
/// normalized arclength parameter.
std::vector<CenterlineSample> densify_polyline(std::span<const Vec2> vertices, double spacing);

/// Stable 64-bit mix used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace threadtrace
