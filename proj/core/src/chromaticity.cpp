#include "rgbn/chromaticity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgbn/error.hpp"

namespace rgbn {

MultiChannelImage clamp_intensities(const MultiChannelImage& image, double floor) {
  MultiChannelImage out = image;
  for (double& v : out.values()) v = std::max(v, floor);
  return out;
}

void log_chromaticity_pixel(std::span<const double> intensities, std::span<double> out) {
  if (out.size() != intensities.size()) {
    throw Error(ErrorCode::DimensionMismatch, "log_chromaticity_pixel output size");
  }
  double mean_log = 0.0;
  for (std::size_t k = 0; k < intensities.size(); ++k) {
    const double r = intensities[k];
    if (!(r > 0.0)) {
      throw Error(ErrorCode::NonPositiveInput,
                  "intensity " + std::to_string(r) + " reached log-chromaticity; clamp first");
    }
    out[k] = std::log(r);
    mean_log += out[k];
  }
  mean_log /= static_cast<double>(intensities.size());
  for (double& v : out) v -= mean_log;
}

LogChromaticityField log_chromaticity(const MultiChannelImage& image) {
  LogChromaticityField field(image.width(), image.height(), image.channels());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    log_chromaticity_pixel(image.pixel(i), field.pixel(i));
  }
  return field;
}

void OrthonormalBasis::project(std::span<const double> full, std::span<double> reduced) const {
  for (int r = 0; r < dims(); ++r) {
    const auto b = row(r);
    double acc = 0.0;
    for (int k = 0; k < channels_; ++k) acc += b[k] * full[k];
    reduced[r] = acc;
  }
}

void OrthonormalBasis::lift(std::span<const double> reduced, std::span<double> full) const {
  std::fill(full.begin(), full.end(), 0.0);
  for (int r = 0; r < dims(); ++r) {
    const auto b = row(r);
    for (int k = 0; k < channels_; ++k) full[k] += b[k] * reduced[r];
  }
}

OrthonormalBasis make_basis(int n_channels) {
  if (n_channels != 3 && n_channels != 4) {
    throw Error(ErrorCode::UnsupportedChannelCount,
                "basis needs 3 or 4 channels, got " + std::to_string(n_channels));
  }
  const auto n = static_cast<std::size_t>(n_channels);
  OrthonormalBasis basis;
  basis.channels_ = n_channels;
  basis.rows_.assign((n - 1) * n, 0.0);

  for (std::size_t r = 0; r + 1 < n; ++r) {
    // Seed vector: e1 + ... + e_{r+1} - (r+1) e_{r+2}
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k <= r; ++k) v[k] = 1.0;
    v[r + 1] = -static_cast<double>(r + 1);

    for (std::size_t p = 0; p < r; ++p) {
      const double* prev = basis.rows_.data() + p * n;
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += prev[k] * v[k];
      for (std::size_t k = 0; k < n; ++k) v[k] -= dot * prev[k];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < n; ++k) basis.rows_[r * n + k] = v[k] / norm;
  }
  return basis;
}

ReducedChromaticityField reduce(const LogChromaticityField& chromaticity,
                                const OrthonormalBasis& basis) {
  if (basis.channels() != chromaticity.channels()) {
    throw Error(ErrorCode::DimensionMismatch,
                "basis has " + std::to_string(basis.channels()) + " channels, field has " +
                    std::to_string(chromaticity.channels()));
  }
  ReducedChromaticityField reduced(chromaticity.width(), chromaticity.height(), basis.dims());
  for (std::size_t i = 0; i < chromaticity.pixel_count(); ++i) {
    basis.project(chromaticity.pixel(i), reduced.pixel(i));
  }
  return reduced;
}

LogChromaticityField lift(const ReducedChromaticityField& reduced, const OrthonormalBasis& basis) {
  if (basis.dims() != reduced.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "basis/reduced dims differ");
  }
  LogChromaticityField field(reduced.width(), reduced.height(), basis.channels());
  for (std::size_t i = 0; i < reduced.pixel_count(); ++i) {
    basis.lift(reduced.pixel(i), field.pixel(i));
  }
  return field;
}

ScalarField luminance(const MultiChannelImage& image) {
  ScalarField out(image.width(), image.height());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    double sum = 0.0;
    for (double v : image.pixel(i)) sum += v;
    out[i] = sum / image.channels();
  }
  return out;
}

PixelBuffer l1_chromaticity(const MultiChannelImage& image) {
  PixelBuffer out(image.width(), image.height(), 3);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const auto px = image.pixel(i);
    double sum = 0.0;
    for (double v : px) sum += v;
    auto dst = out.pixel(i);
    for (int c = 0; c < 3; ++c) dst[c] = sum > 0.0 ? px[c] / sum : 0.0;
  }
  return out;
}

MultiChannelImage drop_nir(const MultiChannelImage& image) {
  if (image.channels() == 3) return image;
  MultiChannelImage out(image.width(), image.height(), 3);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const auto src = image.pixel(i);
    auto dst = out.pixel(i);
    for (int c = 0; c < 3; ++c) dst[c] = src[c];
  }
  return out;
}

}  // namespace rgbn
