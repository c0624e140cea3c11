#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "rgbn/image.hpp"

namespace rgbn {

struct LoadOptions {
  /// Decode sRGB transfer to linear intensities.
  bool linearize = true;
};

double srgb_to_linear(double encoded) noexcept;

/// Reads a 3-channel RGB file and, optionally, a single-channel NIR file of
/// the same size (PNG or TIFF, 8 or 16 bit). Intensities come back in [0, 1].
/// Throws DecodeError for unreadable files and DimensionMismatch when the
/// two files differ in size.
MultiChannelImage load_pair(const std::filesystem::path& rgb_path,
                            const std::optional<std::filesystem::path>& nir_path,
                            const LoadOptions& options = {});

/// Single-channel image scaled to [0, 1]; colour files are converted to gray.
ScalarField load_gray(const std::filesystem::path& path);

/// Values in [0, 1] (clipped), depth 1 or 3. PNG files are written with 8
/// bits per sample, TIFF files with 16; the format follows the extension.
void write_image(const std::filesystem::path& path, const PixelBuffer& image);

/// Raw small-integer labels (0..255) as an 8-bit grayscale PNG.
void write_label_png(const std::filesystem::path& path, int width, int height,
                     std::span<const int> labels);

}  // namespace rgbn
