#pragma once

#include <string>
#include <vector>

#include "threadtrace/curve_search.hpp"
#include "threadtrace/image_io.hpp"
#include "threadtrace/raster.hpp"
#include "threadtrace/spline.hpp"

namespace threadtrace {

struct PipelineConfig {
  double w = 4.0;
  double t_l = 0.039;
  double t_u = 0.196;
  double t_d = 2.0;
  double t_v = 0.1;
  int t_c = 14;
  double mask_tolerance = 0.2;
  double mask_threshold = 0.5;
  double smoothing = 0.0;
  int n_samples = 200;

  void validate() const;
};

struct FusedMaps {
  GradientMap denoised;    // g with inconsistent pixels zeroed
  GradientMap denoised_conjugate;
  ScalarField gray;        // clamp(g + g_conj) after cleaning
  BinaryMask mask;
  std::size_t removed = 0;
};

/// Noise removal with a conjugate pair: inside the mask (g + g_conj >
/// mask_threshold), pixels whose unremapped parameters do not sum to 1 within
/// mask_tolerance are zeroed in both maps and cleared from the mask.
FusedMaps fuse_conjugate(const GradientMap& g, const GradientMap& g_conj, const PipelineConfig& cfg);

struct StageTimings {
  double fuse_ms = 0.0;
  double ridge_ms = 0.0;
  double search_ms = 0.0;
  double link_ms = 0.0;
  double fit_ms = 0.0;
  double total_ms = 0.0;
};

struct ReconstructionResult {
  bool detected = false;
  std::string failure;  // why nothing was detected
  ThreadSpline spline;
  Polyline sampled;
  std::size_t fitted_points = 0;
  std::vector<CurveSegment> segments;
  ScalarField fused_field;
  StageTimings timings;
};

/// Single-map mode: ridges are extracted from the thread indicator (g > 0) and
/// ordered by g directly.
ReconstructionResult reconstruct(const GradientMap& g, const PipelineConfig& cfg);

/// Conjugate mode: ridges come from the fused gray field, ordering
/// intensities from the denoised g. Sampled points run from low to high g.
ReconstructionResult reconstruct(const GradientMap& g, const GradientMap& g_conj, const PipelineConfig& cfg);

/// Ridge points that conjugate-mode reconstruction feeds to the curve search.
LinePointSet thread_line_points(const GradientMap& g, const GradientMap& g_conj, const PipelineConfig& cfg);

/// Field rendered dark with sampled points colored from needle end to tail.
RgbImage render_overlay(const ScalarField& background, const Polyline& sampled);

}  // namespace threadtrace
