#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rgbn {

/// Row-major, pixel-interleaved buffer of doubles. All pipeline fields share
/// this layout; the derived types below only pin down what the depth means.
class PixelBuffer {
 public:
  PixelBuffer() = default;
  PixelBuffer(int width, int height, int depth, double fill = 0.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth() const noexcept { return depth_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> pixel(std::size_t index) noexcept {
    return {data_.data() + index * static_cast<std::size_t>(depth_),
            static_cast<std::size_t>(depth_)};
  }
  std::span<const double> pixel(std::size_t index) const noexcept {
    return {data_.data() + index * static_cast<std::size_t>(depth_),
            static_cast<std::size_t>(depth_)};
  }
  std::span<double> pixel(int x, int y) noexcept { return pixel(index_of(x, y)); }
  std::span<const double> pixel(int x, int y) const noexcept { return pixel(index_of(x, y)); }

  double& at(int x, int y, int c) noexcept { return data_[index_of(x, y) * depth_ + c]; }
  double at(int x, int y, int c) const noexcept { return data_[index_of(x, y) * depth_ + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  /// Same width and height (depth may differ).
  bool same_grid(const PixelBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const PixelBuffer&, const PixelBuffer&) = default;

 protected:
  std::size_t index_of(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int depth_ = 0;
  std::vector<double> data_;
};

/// Linear-intensity RGB (3 channels) or RGBN (4 channels) image in [0, 1].
class MultiChannelImage : public PixelBuffer {
 public:
  MultiChannelImage() = default;
  MultiChannelImage(int width, int height, int channels, double fill = 0.0);

  int channels() const noexcept { return depth(); }
  bool has_nir() const noexcept { return depth() == 4; }
};

/// Per-pixel log(R_k / geometric mean); every pixel sums to zero.
class LogChromaticityField : public PixelBuffer {
 public:
  LogChromaticityField() = default;
  LogChromaticityField(int width, int height, int channels);

  int channels() const noexcept { return depth(); }
};

/// Log-chromaticities expressed in an orthonormal basis of the zero-sum
/// subspace, so dims() == source channels - 1.
class ReducedChromaticityField : public PixelBuffer {
 public:
  ReducedChromaticityField() = default;
  ReducedChromaticityField(int width, int height, int dims);

  int dims() const noexcept { return depth(); }
};

class ScalarField : public PixelBuffer {
 public:
  ScalarField() = default;
  ScalarField(int width, int height, double fill = 0.0);

  double operator[](std::size_t i) const noexcept { return values()[i]; }
  double& operator[](std::size_t i) noexcept { return values()[i]; }
};

}  // namespace rgbn
