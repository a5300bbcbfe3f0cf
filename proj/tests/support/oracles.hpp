#pragma once

// Independent reference computations used by the tests. Everything here is
// deliberately brute force and shares no code with the library beyond the
// basic data types.

#include <cstddef>
#include <span>
#include <vector>

#include "threadtrace/raster.hpp"

namespace threadtrace::oracle {

/// Proper crossings between non-adjacent segments of a polyline, O(n^2),
/// using orientation signs.
int count_crossings(std::span<const CenterlineSample> line);

/// Number of separate passes of the thread over every pixel: a pass is a run
/// of samples within `radius` of the pixel center whose consecutive members
/// are at most `gap` apart in arclength.
Raster<int> pass_counts(const SceneGroundTruth& gt, double radius, double gap);

/// exp(-d^2 / (2 width^2)) around the infinite line through `through` with
/// direction angle `angle`, scaled by `peak`.
ScalarField gaussian_ridge(int width, int height, Vec2 through, double angle, double sigma_profile,
                           double peak = 1.0);

/// Peak second-derivative magnitude of a Gaussian profile of standard
/// deviation `profile` after smoothing at `sigma`, scaled by sigma^2.
double gaussian_ridge_response(double profile, double sigma);

/// Perpendicular distance from p to the infinite line through `through` with
/// direction angle `angle`.
double distance_to_line(Vec2 p, Vec2 through, double angle);

/// Shortest distance from p to a polyline (segments, not just vertices).
double distance_to_polyline(Vec2 p, std::span<const Vec2> polyline);

/// Least-squares slope of values against their index.
double index_slope(std::span<const double> values);

}  // namespace threadtrace::oracle
