#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "rgbn/chromaticity.hpp"
#include "rgbn/error.hpp"
#include "rgbn/render.hpp"
#include "test_support.hpp"

namespace rgbn {
namespace {

TEST(Display, PercentileStretch) {
  std::vector<double> v(101);
  for (int i = 0; i <= 100; ++i) v[i] = i;
  const auto out = normalize_display(v, 1.0, 99.0);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_NEAR(out[50], 0.5, 1e-15);
  EXPECT_EQ(out[99], 1.0);
  EXPECT_EQ(out[100], 1.0);
}

TEST(Display, ConstantImageMapsToHalf) {
  const std::vector<double> v(10, 3.0);
  for (double x : normalize_display(v)) EXPECT_EQ(x, 0.5);
}

TEST(Display, BadPercentiles) {
  const std::vector<double> v = {1, 2, 3};
  EXPECT_THROW(normalize_display(v, 50.0, 50.0), Error);
  EXPECT_THROW(normalize_display(v, -1.0, 50.0), Error);
  EXPECT_THROW(normalize_display(std::vector<double>{}), Error);
}

TEST(Invariant, RawIsExpOfProjection) {
  ReducedChromaticityField f(2, 1, 2);
  f.pixel(0)[0] = 0.3;
  f.pixel(0)[1] = -0.1;
  f.pixel(1)[0] = -1.0;
  f.pixel(1)[1] = 2.0;
  const auto d = ProjectionDirection::from_theta(90.0);
  const auto inv = grayscale_invariant(f, d);
  EXPECT_NEAR(inv.raw[0], std::exp(-0.1), 1e-15);
  EXPECT_NEAR(inv.raw[1], std::exp(2.0), 1e-15);
  const auto disp = inv.display();
  EXPECT_EQ(disp[0], 0.0);
  EXPECT_EQ(disp[1], 1.0);
}

TEST(Projector, SymmetricIdempotentRankOne) {
  for (const auto& d : {ProjectionDirection::from_theta(33.0),
                        ProjectionDirection::from_azimuth_elevation(120.0, -40.0)}) {
    const Eigen::MatrixXd p = line_projector(d);
    EXPECT_LT((p - p.transpose()).norm(), 1e-15);
    EXPECT_LT((p * p - p).norm(), 1e-15);
    EXPECT_NEAR(p.trace(), 1.0, 1e-15);
    Eigen::VectorXd q(d.dims());
    for (int i = 0; i < d.dims(); ++i) q(i) = d.vector()[i];
    EXPECT_LT((p * q - q).norm(), 1e-15);
  }
}

TEST(ShadowFree, ProjectsOntoLine) {
  ReducedChromaticityField f(3, 1, 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (double& v : f.values()) v = n(rng);
  const auto d = ProjectionDirection::from_azimuth_elevation(10.0, 20.0);
  const auto sf = shadow_free_chromaticity(f, d);
  const Eigen::MatrixXd p = line_projector(d);
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    Eigen::Vector3d x(f.pixel(i)[0], f.pixel(i)[1], f.pixel(i)[2]);
    const Eigen::Vector3d px = p * x;
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(sf.projected_log.pixel(i)[k], px(k), 1e-14);
      EXPECT_NEAR(sf.image.pixel(i)[k], std::exp(px(k)), 1e-14);
    }
  }
  EXPECT_THROW(shadow_free_chromaticity(f, ProjectionDirection::from_theta(1.0)), Error);
}

TEST(ShadowFree, FixedPointAndNullSpace) {
  const auto d = ProjectionDirection::from_azimuth_elevation(70.0, -25.0);
  ReducedChromaticityField f(2, 1, 3);
  const auto q = d.vector();
  // Pixel 0 along q, pixel 1 orthogonal to it.
  const Eigen::Vector3d qv(q[0], q[1], q[2]);
  const Eigen::Vector3d ortho = qv.unitOrthogonal();
  for (int k = 0; k < 3; ++k) {
    f.pixel(0)[k] = 0.7 * qv(k);
    f.pixel(1)[k] = 1.3 * ortho(k);
  }
  const auto sf = shadow_free_chromaticity(f, d);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(sf.projected_log.pixel(0)[k], f.pixel(0)[k], 1e-15);
    EXPECT_NEAR(sf.projected_log.pixel(1)[k], 0.0, 1e-15);
    EXPECT_NEAR(sf.image.pixel(1)[k], 1.0, 1e-15);
  }
}

TEST(Invariant, ZeroFieldIsAllOnes) {
  const ReducedChromaticityField f(4, 3, 3);
  const auto inv = grayscale_invariant(f, ProjectionDirection::from_azimuth_elevation(10.0, 5.0));
  for (double v : inv.raw.values()) EXPECT_EQ(v, 1.0);
}

TEST(L1Fit, SelfFitIsIdentity) {
  // rho equal to the shadow-free image: channels in [0.1, 0.3] so a NIR
  // value of 1 - sum keeps the L1 denominator at exactly 1.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(0.1, 0.3);
  ShadowFreeChromaticity sf;
  sf.image = PixelBuffer(10, 10, 3);
  sf.projected_log = PixelBuffer(10, 10, 3);
  MultiChannelImage original(10, 10, 4);
  for (std::size_t i = 0; i < original.pixel_count(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double v = d(rng);
      sf.image.pixel(i)[k] = v;
      sf.projected_log.pixel(i)[k] = std::log(v);
      original.pixel(i)[k] = v;
      sum += v;
    }
    original.pixel(i)[3] = 1.0 - sum;
  }
  const auto fit = fit_l1_mapping(sf, original);
  EXPECT_LT((fit.mapping - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Reconstruct, Identities) {
  const auto p = testing::planted_l1_problem(5, 4, 8);
  GrayInvariantImage ones;
  ones.raw = ScalarField(5, 4, 1.0);
  const auto a = reconstruct_rgb(p.shadow_free, p.m0, ones);
  EXPECT_TRUE(a.reconstructed == a.approximation);

  GrayInvariantImage inv;
  inv.raw = ScalarField(5, 4);
  for (std::size_t i = 0; i < inv.raw.pixel_count(); ++i) inv.raw[i] = 0.1 * static_cast<double>(i + 1);
  auto flat = p;
  for (double& v : flat.shadow_free.image.values()) v = 1.0;
  const auto b = reconstruct_rgb(flat.shadow_free, Eigen::MatrixXd::Identity(3, 3), inv);
  for (std::size_t i = 0; i < inv.raw.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(b.reconstructed.pixel(i)[c], inv.raw[i]);
  }
}

TEST(L1Fit, RecoversPlantedMapping) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = testing::planted_l1_problem(40, 30, seed);
    const auto fit = fit_l1_mapping(p.shadow_free, p.original);
    EXPECT_FALSE(fit.rank_deficient);
    EXPECT_LT((fit.mapping - p.m0).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(fit.residual_sum_squares, 1e-20);
  }
}

TEST(L1Fit, OptimalAgainstPerturbations) {
  auto p = testing::planted_l1_problem(32, 32, 9);
  // Add noise to the target so the optimum has a nonzero residual.
  std::mt19937_64 rng(10);
  std::normal_distribution<double> noise(0.0, 0.003);
  for (double& v : p.original.values()) v = std::max(v + noise(rng), 0.01);
  const auto fit = fit_l1_mapping(p.shadow_free, p.original);
  std::uniform_real_distribution<double> delta(-0.01, 0.01);
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd m = fit.mapping;
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) += delta(rng);
    EXPECT_LE(fit.residual_sum_squares, l1_fit_residual(p.shadow_free, p.original, m));
  }
}

TEST(L1Fit, RankDeficientUsesMinimumNorm) {
  auto p = testing::planted_l1_problem(8, 8, 4);
  for (std::size_t i = 0; i < p.original.pixel_count(); ++i) {
    auto a = p.shadow_free.image.pixel(i);
    a[1] = a[0];  // two identical columns
  }
  const auto fit = fit_l1_mapping(p.shadow_free, p.original);
  EXPECT_TRUE(fit.rank_deficient);
  EXPECT_TRUE(fit.mapping.allFinite());
  EXPECT_LT((fit.mapping.row(0) - fit.mapping.row(1)).norm(), 1e-9);
}

TEST(L1Fit, ShapeChecks) {
  const auto p = testing::planted_l1_problem(4, 4, 5);
  const auto rgb = drop_nir(p.original);
  try {
    fit_l1_mapping(p.shadow_free, rgb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(l1_fit_residual(p.shadow_free, p.original, Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST(L1Fit, RgbBaselineHasTwoRows) {
  const auto img = testing::random_image(10, 10, 3, 12, 0.05, 1.0);
  const auto b = make_basis(3);
  const auto red = reduce(log_chromaticity(img), b);
  const auto d = ProjectionDirection::from_theta(45.0);
  const auto sf = shadow_free_chromaticity(red, d);
  const auto fit = fit_l1_mapping(sf, img);
  EXPECT_EQ(fit.mapping.rows(), 2);
  EXPECT_EQ(fit.mapping.cols(), 3);
}

TEST(Reconstruct, ComposesInvariantAndMapping) {
  const auto p = testing::planted_l1_problem(6, 5, 6);
  GrayInvariantImage inv;
  inv.raw = ScalarField(6, 5, 2.0);
  const auto rec = reconstruct_rgb(p.shadow_free, p.m0, inv);
  for (std::size_t i = 0; i < inv.raw.pixel_count(); ++i) {
    const double sum = p.original.pixel(i)[0] + p.original.pixel(i)[1] + p.original.pixel(i)[2] +
                       p.original.pixel(i)[3];
    for (int c = 0; c < 3; ++c) {
      const double rho = p.original.pixel(i)[c] / sum;
      EXPECT_NEAR(rec.approximation.pixel(i)[c], rho, 1e-12);
      EXPECT_NEAR(rec.reconstructed.pixel(i)[c], 2.0 * rho, 1e-12);
      EXPECT_EQ(rec.projection_only.pixel(i)[c], p.shadow_free.image.pixel(i)[c]);
    }
  }
  EXPECT_THROW(reconstruct_rgb(p.shadow_free, Eigen::MatrixXd::Zero(3, 2), inv), Error);
}

}  // namespace
}  // namespace rgbn
