#include "rgbn/image.hpp"

#include <string>

#include "rgbn/error.hpp"

namespace rgbn {

PixelBuffer::PixelBuffer(int width, int height, int depth, double fill)
    : width_(width), height_(height), depth_(depth) {
  if (width < 1 || height < 1 || depth < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "pixel buffer needs positive extents, got " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(depth));
  }
  data_.assign(pixel_count() * static_cast<std::size_t>(depth), fill);
}

namespace {

int checked_channels(int channels) {
  if (channels != 3 && channels != 4) {
    throw Error(ErrorCode::UnsupportedChannelCount,
                "expected 3 or 4 channels, got " + std::to_string(channels));
  }
  return channels;
}

}  // namespace

MultiChannelImage::MultiChannelImage(int width, int height, int channels, double fill)
    : PixelBuffer(width, height, checked_channels(channels), fill) {}

LogChromaticityField::LogChromaticityField(int width, int height, int channels)
    : PixelBuffer(width, height, channels) {}

ReducedChromaticityField::ReducedChromaticityField(int width, int height, int dims)
    : PixelBuffer(width, height, dims) {}

ScalarField::ScalarField(int width, int height, double fill)
    : PixelBuffer(width, height, 1, fill) {}

}  // namespace rgbn
