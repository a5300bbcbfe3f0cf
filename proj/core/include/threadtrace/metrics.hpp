#pragma once

#include <limits>
#include <span>

#include "threadtrace/raster.hpp"

namespace threadtrace {

/// PSNR of identical maps.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) over all pixels; peak value is 1.
double psnr(const ScalarField& a, const ScalarField& b);
double psnr(const GradientMap& a, const GradientMap& b);

struct OttpReport {
  double overall = 0.0;     // mean distance from predicted points to the nearest ground-truth point
  double needle_end = 0.0;  // first predicted point to the s = 0 ground-truth point
  double tail_end = 0.0;    // last predicted point to the s = 1 ground-truth point
};

OttpReport ottp(std::span<const Vec2> predicted, std::span<const CenterlineSample> ground_truth);

}  // namespace threadtrace
