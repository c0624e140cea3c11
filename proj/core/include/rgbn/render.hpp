#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "rgbn/entropy.hpp"
#include "rgbn/image.hpp"

namespace rgbn {

struct DisplayRange {
  double low_pct = 1.0;
  double high_pct = 99.0;
};

/// Linear stretch mapping the low_pct percentile of all values to 0 and the
/// high_pct percentile to 1, clipping outside. A degenerate window (e.g. a
/// constant image) maps everything inside it to 0.5.
std::vector<double> normalize_display(std::span<const double> values, double low_pct = 1.0,
                                      double high_pct = 99.0);
PixelBuffer normalize_display(const PixelBuffer& image, const DisplayRange& range = {});

/// exp(reduced . q) per pixel. Raw values are what metrics consume; display()
/// applies the stretch recorded alongside.
struct GrayInvariantImage {
  ScalarField raw;
  DisplayRange range;

  ScalarField display() const;
};

GrayInvariantImage grayscale_invariant(const ReducedChromaticityField& reduced,
                                       const ProjectionDirection& direction,
                                       const DisplayRange& range = {});

/// q q^T, the symmetric rank-1 projector onto the line of q.
Eigen::MatrixXd line_projector(const ProjectionDirection& direction);

/// exp(P reduced) per pixel, where P projects onto the optimal direction.
/// `projected_log` keeps the log-domain values for inspection.
struct ShadowFreeChromaticity {
  PixelBuffer projected_log;
  PixelBuffer image;
  Eigen::MatrixXd projector;
};

ShadowFreeChromaticity shadow_free_chromaticity(const ReducedChromaticityField& reduced,
                                                const ProjectionDirection& direction);

/// Least-squares map M (dims x 3) with rho ~= I_shadow_free * M, where rho is
/// the L1 chromaticity {R,G,B} / sum of all channels.
struct L1Fit {
  Eigen::MatrixXd mapping;
  /// The normal matrix was rank deficient and the minimum-norm solution was used.
  bool rank_deficient = false;
  double residual_sum_squares = 0.0;
};

L1Fit fit_l1_mapping(const ShadowFreeChromaticity& shadow_free, const MultiChannelImage& original);

/// Sum over pixels of ||rho - I * M||^2 for an arbitrary M.
double l1_fit_residual(const ShadowFreeChromaticity& shadow_free,
                       const MultiChannelImage& original, const Eigen::MatrixXd& mapping);

struct ReconstructedImage {
  PixelBuffer approximation;   ///< I_shadow_free * M
  PixelBuffer reconstructed;   ///< raw invariant times the approximation, per channel
  PixelBuffer projection_only; ///< shadow-free chromaticity padded to 3 channels
  Eigen::MatrixXd mapping;

  PixelBuffer display(const DisplayRange& range = {}) const;
};

ReconstructedImage reconstruct_rgb(const ShadowFreeChromaticity& shadow_free,
                                   const Eigen::MatrixXd& mapping,
                                   const GrayInvariantImage& invariant);

}  // namespace rgbn
