#pragma once

#include "rgbn/chromaticity.hpp"
#include "rgbn/entropy.hpp"
#include "rgbn/image.hpp"
#include "rgbn/render.hpp"

namespace rgbn {

struct PipelineOptions {
  double grid_step_deg = 1.0;
  double trim = 0.05;
  DisplayRange display;
  double intensity_floor = kIntensityFloor;

  /// Throws InvalidArgument unless grid step > 0, trim in [0, 0.25] and the
  /// display percentiles are ordered.
  void validate() const;
};

/// Every intermediate of one run, from the clamped input to the
/// reconstructed RGB image.
struct PipelineResult {
  MultiChannelImage clamped;
  LogChromaticityField chromaticity;
  OrthonormalBasis basis;
  ReducedChromaticityField reduced;
  SearchResult search;
  GrayInvariantImage invariant;
  ShadowFreeChromaticity shadow_free;
  L1Fit fit;
  ReconstructedImage reconstruction;
};

/// clamp -> log-chromaticity -> reduce -> entropy search -> render.
/// A 4-channel image searches the 3D reduced space, a 3-channel one the 2D.
PipelineResult run_pipeline(const MultiChannelImage& image, const PipelineOptions& options = {});

}  // namespace rgbn
