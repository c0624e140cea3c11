#pragma once

#include <span>
#include <vector>

#include "rgbn/image.hpp"

namespace rgbn {

/// Intensities are clamped to this floor before taking logs: a quarter of an
/// 8-bit quantization step.
inline constexpr double kIntensityFloor = 1.0 / (4.0 * 255.0);

/// Clamp every channel to at least `floor` (and leave everything else alone).
MultiChannelImage clamp_intensities(const MultiChannelImage& image,
                                    double floor = kIntensityFloor);

/// Geometric-mean log-chromaticity of a single pixel:
/// out_k = log(R_k) - mean_j log(R_j) = log(R_k / R_m).
/// Throws NonPositiveInput on any R_k <= 0.
void log_chromaticity_pixel(std::span<const double> intensities, std::span<double> out);

LogChromaticityField log_chromaticity(const MultiChannelImage& image);

/// Rows of an orthonormal basis for the subspace orthogonal to the all-ones
/// vector in n-space. The rows are Gram-Schmidt on
/// {e1-e2, e1+e2-2e3, e1+e2+e3-3e4} truncated to n.
class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;

  int channels() const noexcept { return channels_; }
  int dims() const noexcept { return channels_ - 1; }

  std::span<const double> row(int i) const noexcept {
    return {rows_.data() + static_cast<std::size_t>(i) * channels_,
            static_cast<std::size_t>(channels_)};
  }

  /// reduced = B * full
  void project(std::span<const double> full, std::span<double> reduced) const;
  /// full = B^T * reduced
  void lift(std::span<const double> reduced, std::span<double> full) const;

 private:
  friend OrthonormalBasis make_basis(int n_channels);
  int channels_ = 0;
  std::vector<double> rows_;
};

OrthonormalBasis make_basis(int n_channels);

ReducedChromaticityField reduce(const LogChromaticityField& chromaticity,
                                const OrthonormalBasis& basis);

/// Inverse of reduce() on zero-sum data.
LogChromaticityField lift(const ReducedChromaticityField& reduced, const OrthonormalBasis& basis);

/// (R+G+B+N)/N per pixel; display only.
ScalarField luminance(const MultiChannelImage& image);

/// First three channels divided by the sum of all channels.
PixelBuffer l1_chromaticity(const MultiChannelImage& image);

/// The same image with the NIR plane removed.
MultiChannelImage drop_nir(const MultiChannelImage& image);

}  // namespace rgbn
