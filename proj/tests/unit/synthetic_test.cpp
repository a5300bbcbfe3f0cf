#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "threadtrace/synthetic.hpp"

namespace threadtrace {
namespace {

SceneConfig small_scene(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.width = 200;
  cfg.height = 160;
  cfg.n_control_points = 6;
  cfg.seed = seed;
  return cfg;
}

TEST(GenerateScene, DeterministicPerSeed) {
  EXPECT_EQ(generate_scene(small_scene(4)), generate_scene(small_scene(4)));
  EXPECT_NE(generate_scene(small_scene(4)).centerline, generate_scene(small_scene(5)).centerline);
}

TEST(GenerateScene, RejectsInvalidConfig) {
  SceneConfig cfg = small_scene(1);
  cfg.min_self_intersections = 3;
  cfg.max_self_intersections = 1;
  EXPECT_THROW(generate_scene(cfg), ArgumentError);
  cfg = small_scene(1);
  cfg.n_control_points = 3;
  EXPECT_THROW(generate_scene(cfg), ArgumentError);
}

TEST(GenerateScene, CrossingCountsMatchOracleAndRange) {
  int seen[3] = {0, 0, 0};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SceneConfig cfg;
    cfg.seed = mix_seed(99, seed);
    const SceneGroundTruth gt = generate_scene(cfg);
    const int oracle = oracle::count_crossings(gt.centerline);
    EXPECT_EQ(count_self_intersections(gt.centerline), oracle) << "seed " << seed;
    ASSERT_GE(oracle, 0);
    ASSERT_LE(oracle, 2);
    ++seen[oracle];
  }
  EXPECT_GT(seen[0], 0);
  EXPECT_GT(seen[1], 0);
  EXPECT_GT(seen[2], 0);
}

TEST(GenerateScene, CenterlineParameterIsMonotoneFromZeroToOne) {
  const SceneGroundTruth gt = generate_scene(small_scene(8));
  ASSERT_GE(gt.centerline.size(), 2u);
  EXPECT_EQ(gt.centerline.front().s, 0.0);
  EXPECT_EQ(gt.centerline.back().s, 1.0);
  for (std::size_t i = 1; i < gt.centerline.size(); ++i) EXPECT_GT(gt.centerline[i].s, gt.centerline[i - 1].s);
}

TEST(Rendering, OverlapLabelsMatchBruteForcePassCount) {
  for (std::uint64_t seed : {3u, 11u}) {
    SceneConfig cfg;
    cfg.seed = seed;
    cfg.min_self_intersections = 1;
    const SceneGroundTruth gt = generate_scene(cfg);
    const Raster<int> passes = oracle::pass_counts(gt, cfg.thread_width / 2.0 + 0.5, 1.0);
    int mismatches = 0;
    for (int y = 0; y < gt.height; ++y) {
      for (int x = 0; x < gt.width; ++x) {
        const int n = passes(x, y);
        const OverlapLabel expected =
            n >= 2 ? OverlapLabel::Overlap : (n == 1 ? OverlapLabel::NonOverlap : OverlapLabel::Background);
        if (gt.overlap(x, y) != expected) ++mismatches;
      }
    }
    EXPECT_EQ(mismatches, 0) << "seed " << seed;
  }
}

TEST(Rendering, MaskIsPositiveGradient) {
  const SceneGroundTruth gt = generate_scene(small_scene(6));
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) EXPECT_EQ(gt.mask(x, y) != 0, gt.gradient(x, y) > 0.0);
  }
}

TEST(Rendering, ConjugatePairSumsToOnePlusFloorOnFullyCoveredPixels) {
  const SceneGroundTruth gt = generate_scene(small_scene(12));
  const double w = 4.0;
  const GradientMap conj = conjugate_ground_truth(gt, w);
  const Polyline line = centerline_points(gt.centerline);
  int checked = 0;
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      const double d = oracle::distance_to_polyline({double(x), double(y)}, line);
      if (d > w / 2.0 - 0.5 - 1e-6) continue;
      EXPECT_NEAR(gt.gradient(x, y) + conj(x, y), 1.0 + kParameterFloor, 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Rendering, ValuesFollowTheRemappedParameter) {
  const SceneGroundTruth gt = generate_scene(small_scene(13));
  const CenterlineSample& mid = gt.centerline[gt.centerline.size() / 2];
  const int x = static_cast<int>(std::lround(mid.position.x));
  const int y = static_cast<int>(std::lround(mid.position.y));
  ASSERT_EQ(gt.overlap(x, y), OverlapLabel::NonOverlap);
  EXPECT_NEAR(gt.gradient(x, y), remap_parameter(mid.s), 0.02);
  EXPECT_EQ(render_gradient_map(gt, 4.0), gt.gradient);
}

TEST(Degradation, OccludersZeroTheirRectangles) {
  const SceneGroundTruth gt = generate_scene(small_scene(14));
  const std::vector<PixelRect> rects = place_occluders(gt, 2, 20, 8.0, 5);
  ASSERT_EQ(rects.size(), 2u);
  const GradientMap out = apply_degradation(gt.gradient, 0.0, rects, 5);
  for (const PixelRect& r : rects) {
    for (int y = r.y; y < r.y + r.height; ++y) {
      for (int x = r.x; x < r.x + r.width; ++x) {
        if (out.field().contains(x, y)) EXPECT_EQ(out(x, y), 0.0);
      }
    }
  }
}

TEST(Degradation, OccludersKeepClearOfThreadEnds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SceneGroundTruth gt = generate_scene(small_scene(seed + 40));
    for (const PixelRect& r : place_occluders(gt, 1, 30, 8.0, seed)) {
      for (const Vec2 end : {gt.centerline.front().position, gt.centerline.back().position}) {
        const double dx = std::max({double(r.x) - end.x, 0.0, end.x - double(r.x + r.width - 1)});
        const double dy = std::max({double(r.y) - end.y, 0.0, end.y - double(r.y + r.height - 1)});
        EXPECT_GE(std::hypot(dx, dy), 8.0);
      }
    }
  }
}

TEST(SaltNoise, RespectsKeepClearMaskAndSharesTheRandomStream) {
  const SceneGroundTruth gt = generate_scene(small_scene(15));
  const GradientMap free = apply_salt_noise(gt.gradient, 0.05, 77);
  const GradientMap guarded = apply_salt_noise(gt.gradient, gt.mask, 0.05, 77);
  int salted = 0;
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      if (gt.mask(x, y)) {
        EXPECT_EQ(guarded(x, y), gt.gradient(x, y));
      } else {
        EXPECT_EQ(guarded(x, y), free(x, y));
        salted += guarded(x, y) != 0.0;
      }
    }
  }
  const double fraction = double(salted) / double(gt.width * gt.height);
  EXPECT_NEAR(fraction, 0.05, 0.01);
  EXPECT_EQ(apply_salt_noise(gt.gradient, gt.mask, 0.05, 77), guarded);
}

TEST(Densify, UniformSpacingAndEndpoints) {
  const std::vector<Vec2> v = {{0.0, 0.0}, {10.0, 0.0}, {10.0, 5.0}};
  const auto d = densify_polyline(v, 0.25);
  EXPECT_EQ(d.front().position, v.front());
  EXPECT_NEAR(distance(d.back().position, v.back()), 0.0, 1e-9);
  EXPECT_EQ(d.size(), 61u);
}

}  // namespace
}  // namespace threadtrace
