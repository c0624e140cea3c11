#include "rgbn/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "rgbn/error.hpp"

namespace rgbn {

namespace {

cv::Mat read_any(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::DecodeError, "no such file: " + path.string());
  }
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
  return m;
}

// Full-scale value of an integer sample type; floats are taken as-is.
double full_scale(int depth, const std::filesystem::path& path) {
  switch (depth) {
    case CV_8U: return 255.0;
    case CV_16U: return 65535.0;
    case CV_32F:
    case CV_64F: return 1.0;
    default:
      throw Error(ErrorCode::DecodeError, "unsupported sample type in " + path.string());
  }
}

cv::Mat to_unit_double(const cv::Mat& m, const std::filesystem::path& path) {
  cv::Mat out;
  m.convertTo(out, CV_MAKETYPE(CV_64F, m.channels()), 1.0 / full_scale(m.depth(), path));
  return out;
}

cv::Mat to_rgb(const cv::Mat& m, const std::filesystem::path& path) {
  cv::Mat rgb;
  switch (m.channels()) {
    case 3: cv::cvtColor(m, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(m, rgb, cv::COLOR_BGRA2RGB); break;
    default:
      throw Error(ErrorCode::DecodeError,
                  path.string() + " has " + std::to_string(m.channels()) +
                      " channels; an RGB image is required");
  }
  return rgb;
}

cv::Mat to_gray(const cv::Mat& m) {
  if (m.channels() == 1) return m;
  cv::Mat gray;
  cv::cvtColor(m, gray, m.channels() == 4 ? cv::COLOR_BGRA2GRAY : cv::COLOR_BGR2GRAY);
  return gray;
}

}  // namespace

double srgb_to_linear(double encoded) noexcept {
  const double c = std::clamp(encoded, 0.0, 1.0);
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

MultiChannelImage load_pair(const std::filesystem::path& rgb_path,
                            const std::optional<std::filesystem::path>& nir_path,
                            const LoadOptions& options) {
  const cv::Mat rgb = to_unit_double(to_rgb(read_any(rgb_path), rgb_path), rgb_path);
  cv::Mat nir;
  if (nir_path) {
    nir = to_unit_double(to_gray(read_any(*nir_path)), *nir_path);
    if (nir.rows != rgb.rows || nir.cols != rgb.cols) {
      throw Error(ErrorCode::DimensionMismatch,
                  "NIR is " + std::to_string(nir.cols) + "x" + std::to_string(nir.rows) +
                      " but RGB is " + std::to_string(rgb.cols) + "x" + std::to_string(rgb.rows));
    }
  }

  const int channels = nir_path ? 4 : 3;
  MultiChannelImage img(rgb.cols, rgb.rows, channels);
  auto decode = [&](double v) { return options.linearize ? srgb_to_linear(v) : std::max(v, 0.0); };
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* src = rgb.ptr<cv::Vec3d>(y);
    const double* nsrc = nir_path ? nir.ptr<double>(y) : nullptr;
    for (int x = 0; x < rgb.cols; ++x) {
      auto px = img.pixel(x, y);
      for (int c = 0; c < 3; ++c) px[c] = decode(src[x][c]);
      if (nsrc) px[3] = decode(nsrc[x]);
    }
  }
  return img;
}

ScalarField load_gray(const std::filesystem::path& path) {
  const cv::Mat m = to_unit_double(to_gray(read_any(path)), path);
  ScalarField out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const double* src = m.ptr<double>(y);
    for (int x = 0; x < m.cols; ++x) out.at(x, y, 0) = src[x];
  }
  return out;
}

void write_image(const std::filesystem::path& path, const PixelBuffer& image) {
  if (image.depth() != 1 && image.depth() != 3) {
    throw Error(ErrorCode::InvalidArgument,
                "can only write 1- or 3-channel images, got " + std::to_string(image.depth()));
  }
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  const bool tiff = ext == ".tif" || ext == ".tiff";
  if (!tiff && ext != ".png") {
    throw Error(ErrorCode::InvalidArgument, "unsupported output format: " + path.string());
  }
  const double scale = tiff ? 65535.0 : 255.0;
  const int depth = tiff ? CV_16U : CV_8U;

  cv::Mat m(image.height(), image.width(), CV_MAKETYPE(depth, image.depth()));
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto px = image.pixel(x, y);
      for (int c = 0; c < image.depth(); ++c) {
        // OpenCV stores colour as BGR.
        const int dst_c = image.depth() == 3 ? 2 - c : c;
        const double v = std::lround(std::clamp(px[c], 0.0, 1.0) * scale);
        if (tiff) {
          m.ptr<std::uint16_t>(y)[x * image.depth() + dst_c] = static_cast<std::uint16_t>(v);
        } else {
          m.ptr<std::uint8_t>(y)[x * image.depth() + dst_c] = static_cast<std::uint8_t>(v);
        }
      }
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), m)) {
    throw Error(ErrorCode::IoError, "failed to write " + path.string());
  }
}

void write_label_png(const std::filesystem::path& path, int width, int height,
                     std::span<const int> labels) {
  if (width < 1 || height < 1 ||
      labels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::DimensionMismatch, "label map size does not match image size");
  }
  cv::Mat m(height, width, CV_8UC1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int v = labels[static_cast<std::size_t>(y) * width + x];
      if (v < 0 || v > 255) throw Error(ErrorCode::OutOfRange, "label outside 0..255");
      m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(v);
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), m)) {
    throw Error(ErrorCode::IoError, "failed to write " + path.string());
  }
}

}  // namespace rgbn
