#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rgbn/chromaticity.hpp"
#include "rgbn/error.hpp"
#include "test_support.hpp"

namespace rgbn {
namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(PixelBuffer, LayoutIsRowMajorInterleaved) {
  PixelBuffer b(3, 2, 2);
  b.at(2, 1, 1) = 7.0;
  EXPECT_EQ(b.values()[(1 * 3 + 2) * 2 + 1], 7.0);
  EXPECT_EQ(b.pixel(2, 1)[1], 7.0);
  EXPECT_EQ(b.pixel_count(), 6u);
}

TEST(PixelBuffer, RejectsNonPositiveExtent) {
  EXPECT_THROW(PixelBuffer(0, 2, 1), Error);
  EXPECT_THROW(PixelBuffer(2, 2, 0), Error);
}

TEST(MultiChannelImage, OnlyThreeOrFourChannels) {
  try {
    MultiChannelImage img(2, 2, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedChannelCount);
  }
  EXPECT_TRUE(MultiChannelImage(2, 2, 4).has_nir());
  EXPECT_FALSE(MultiChannelImage(2, 2, 3).has_nir());
}

TEST(LogChromaticity, KnownPixel) {
  const double in[4] = {0.4, 0.1, 0.1, 0.1};
  double out[4];
  log_chromaticity_pixel(in, out);
  EXPECT_NEAR(out[0], 1.0397207708399179, 1e-15);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(out[k], -0.34657359027997264, 1e-15);
}

TEST(LogChromaticity, GrayPixelIsZero) {
  const double in[3] = {0.3, 0.3, 0.3};
  double out[3];
  log_chromaticity_pixel(in, out);
  for (double v : out) EXPECT_EQ(v, 0.0);
}

TEST(LogChromaticity, NonPositiveInputThrows) {
  const double in[4] = {0.4, 0.0, 0.1, 0.1};
  double out[4];
  try {
    log_chromaticity_pixel(in, out);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveInput);
  }
}

TEST(LogChromaticity, ZeroSumProperty) {
  for (int channels : {3, 4}) {
    const auto img = testing::random_image(32, 32, channels, 11u + channels, 1e-3, 1.0);
    const auto phi = log_chromaticity(img);
    for (std::size_t i = 0; i < phi.pixel_count(); ++i) {
      const auto p = phi.pixel(i);
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 0.0, 1e-12);
    }
  }
}

TEST(LogChromaticity, ScaleInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pix(0.01, 1.0), scale(0.01, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    double r[4], cr[4], a[4], b[4];
    const double c = scale(rng);
    for (int k = 0; k < 4; ++k) {
      r[k] = pix(rng);
      cr[k] = c * r[k];
    }
    log_chromaticity_pixel(r, a);
    log_chromaticity_pixel(cr, b);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(Clamp, FloorAppliedOnlyBelow) {
  MultiChannelImage img(1, 1, 4);
  const double px[4] = {0.0, 1e-6, 0.5, -0.2};
  std::copy(px, px + 4, img.pixel(0).begin());
  const auto c = clamp_intensities(img);
  EXPECT_EQ(c.pixel(0)[0], kIntensityFloor);
  EXPECT_EQ(c.pixel(0)[1], kIntensityFloor);
  EXPECT_EQ(c.pixel(0)[2], 0.5);
  EXPECT_EQ(c.pixel(0)[3], kIntensityFloor);
  EXPECT_DOUBLE_EQ(kIntensityFloor, 1.0 / 1020.0);
}

TEST(Basis, RowsOrthonormalAndOrthogonalToOnes) {
  for (int n : {3, 4}) {
    const auto b = make_basis(n);
    ASSERT_EQ(b.dims(), n - 1);
    for (int i = 0; i < b.dims(); ++i) {
      const auto ri = b.row(i);
      EXPECT_NEAR(std::accumulate(ri.begin(), ri.end(), 0.0), 0.0, 1e-15);
      for (int j = 0; j < b.dims(); ++j) {
        const auto rj = b.row(j);
        double d = 0.0;
        for (int k = 0; k < n; ++k) d += ri[k] * rj[k];
        EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-15);
      }
    }
  }
}

TEST(Basis, FirstRowsMatchConstruction) {
  const auto b = make_basis(4);
  const double s2 = 1.0 / std::sqrt(2.0), s6 = 1.0 / std::sqrt(6.0), s12 = 1.0 / std::sqrt(12.0);
  const double expect[3][4] = {{s2, -s2, 0, 0}, {s6, s6, -2 * s6, 0}, {s12, s12, s12, -3 * s12}};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(b.row(i)[k], expect[i][k], 1e-15);
  }
}

TEST(Basis, UnsupportedChannelCount) {
  EXPECT_THROW(make_basis(2), Error);
  EXPECT_THROW(make_basis(5), Error);
}

TEST(Reduce, KnownPixel) {
  const auto b = make_basis(4);
  const double phi[4] = {1.0397207708399179, -0.34657359027997264, -0.34657359027997264,
                         -0.34657359027997264};
  double red[3];
  b.project(phi, red);
  EXPECT_NEAR(red[0], 0.98025814, 1e-8);
  EXPECT_NEAR(red[1], 0.5659523, 1e-7);
  EXPECT_NEAR(red[2], 0.40018871, 1e-8);
  EXPECT_NEAR(norm(red), 1.2005661338529434, 1e-12);
}

TEST(Reduce, IsometryAndRoundTrip) {
  for (int channels : {3, 4}) {
    const auto img = testing::random_image(16, 16, channels, 99u + channels);
    const auto phi = log_chromaticity(img);
    const auto b = make_basis(channels);
    const auto red = reduce(phi, b);
    ASSERT_EQ(red.dims(), channels - 1);
    const auto back = lift(red, b);
    for (std::size_t i = 0; i < phi.pixel_count(); ++i) {
      EXPECT_NEAR(norm(phi.pixel(i)), norm(red.pixel(i)), 1e-9);
      for (int k = 0; k < channels; ++k) EXPECT_NEAR(back.pixel(i)[k], phi.pixel(i)[k], 1e-12);
    }
  }
}

TEST(Reduce, ChannelMismatchThrows) {
  const auto phi = log_chromaticity(testing::random_image(2, 2, 3, 1));
  try {
    reduce(phi, make_basis(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Luminance, ChannelMean) {
  MultiChannelImage img(1, 1, 4);
  const double px[4] = {0.2, 0.4, 0.6, 0.8};
  std::copy(px, px + 4, img.pixel(0).begin());
  EXPECT_NEAR(luminance(img)[0], 0.5, 1e-15);
}

TEST(L1Chromaticity, DividesRgbBySumOfAllChannels) {
  MultiChannelImage img(1, 1, 4);
  const double px[4] = {0.1, 0.2, 0.3, 0.4};
  std::copy(px, px + 4, img.pixel(0).begin());
  const auto rho = l1_chromaticity(img);
  ASSERT_EQ(rho.depth(), 3);
  EXPECT_NEAR(rho.pixel(0)[0], 0.1, 1e-15);
  EXPECT_NEAR(rho.pixel(0)[1], 0.2, 1e-15);
  EXPECT_NEAR(rho.pixel(0)[2], 0.3, 1e-15);
}

TEST(DropNir, KeepsRgb) {
  const auto img = testing::random_image(3, 3, 4, 2);
  const auto rgb = drop_nir(img);
  ASSERT_EQ(rgb.channels(), 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(rgb.pixel(i)[c], img.pixel(i)[c]);
  }
}

}  // namespace
}  // namespace rgbn
