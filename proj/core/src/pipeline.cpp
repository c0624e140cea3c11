#include "rgbn/pipeline.hpp"

#include <string>

#include "rgbn/error.hpp"

namespace rgbn {

void PipelineOptions::validate() const {
  if (!(grid_step_deg > 0.0 && grid_step_deg <= 180.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "grid step must lie in (0, 180], got " + std::to_string(grid_step_deg));
  }
  if (!(trim >= 0.0 && trim <= 0.25)) {
    throw Error(ErrorCode::InvalidArgument,
                "trim fraction must lie in [0, 0.25], got " + std::to_string(trim));
  }
  if (!(display.low_pct >= 0.0 && display.high_pct <= 100.0 &&
        display.low_pct < display.high_pct)) {
    throw Error(ErrorCode::InvalidArgument, "normalization percentiles need low < high in [0,100]");
  }
  if (!(intensity_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "intensity floor must be positive");
  }
}

PipelineResult run_pipeline(const MultiChannelImage& image, const PipelineOptions& options) {
  options.validate();
  PipelineResult r;
  r.clamped = clamp_intensities(image, options.intensity_floor);
  r.chromaticity = log_chromaticity(r.clamped);
  r.basis = make_basis(image.channels());
  r.reduced = reduce(r.chromaticity, r.basis);
  r.search = find_optimal_direction(r.reduced, options.grid_step_deg, HistogramSpec{options.trim});
  r.invariant = grayscale_invariant(r.reduced, r.search.direction, options.display);
  r.shadow_free = shadow_free_chromaticity(r.reduced, r.search.direction);
  r.fit = fit_l1_mapping(r.shadow_free, r.clamped);
  r.reconstruction = reconstruct_rgb(r.shadow_free, r.fit.mapping, r.invariant);
  return r;
}

}  // namespace rgbn
