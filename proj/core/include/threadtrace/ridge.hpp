#pragma once

#include <vector>

#include "threadtrace/raster.hpp"

namespace threadtrace {

struct StegerParams {
  double sigma = 1.0;
  double lower = 0.0;  // hysteresis floor on the line response
  double upper = 0.0;  // responses at or above this seed acceptance

  void validate() const;
};

/// Smoothing scale for a thread of full width w: w / (2 sqrt 3) + 0.5.
double sigma_from_width(double w);

struct LinePoint {
  Vec2 position;
  Vec2 tangent;  // unit length, sign-ambiguous; normalized so y >= 0 (x >= 0 on ties)
  double response = 0.0;
  double intensity = 0.0;

  friend bool operator==(const LinePoint&, const LinePoint&) = default;
};

struct LinePointSet {
  std::vector<LinePoint> points;
  int width = 0;
  int height = 0;
};

/// Sub-pixel centerline points of bright curvilinear structures.
///
/// Derivatives come from Gaussian kernels (truncated at 3.5 sigma, reflect
/// padding). A pixel is a candidate when the Hessian eigenvalue of largest
/// magnitude is negative and the Taylor extremum along its eigenvector falls
/// inside the pixel. The response is that eigenvalue's magnitude scaled by
/// sigma^2, which makes it comparable across scales and puts a unit-height bar
/// of width w near 0.46 at sigma_from_width(w). Points above `upper` are kept
/// together with points above `lower` that are 8-connected to them.
LinePointSet extract_line_points(const ScalarField& gray, const StegerParams& params);

/// Replaces each point's intensity with a bilinear sample of `field`, clamped to [0,1].
void resample_intensity(LinePointSet& set, const ScalarField& field);

/// Coverage-normalized variant: takes field / weight at the one of the four
/// surrounding pixels with the largest bilinear weight times coverage, so that
/// neither the background nor a second strand is blended in. Zero where no
/// surrounding pixel is covered.
void resample_intensity(LinePointSet& set, const ScalarField& field, const ScalarField& weight);

/// Dense derivative images at one scale; exposed for diagnostics and tests.
struct DerivativeImages {
  ScalarField rx, ry, rxx, rxy, ryy;
};
DerivativeImages gaussian_derivatives(const ScalarField& field, double sigma);

}  // namespace threadtrace
