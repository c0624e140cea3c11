#include "rgbn/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rgbn/chromaticity.hpp"
#include "rgbn/error.hpp"

namespace rgbn {

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

void check_grid(const PixelBuffer& a, const PixelBuffer& b, const char* what) {
  if (!a.same_grid(b)) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": pixel grids differ");
  }
}

// rho = first three channels over the sum of all channels, from the clamped image.
void l1_pixel(std::span<const double> px, double floor, double rho[3]) {
  double sum = 0.0;
  for (double v : px) sum += std::max(v, floor);
  for (int c = 0; c < 3; ++c) rho[c] = std::max(px[c], floor) / sum;
}

void check_fit_inputs(const ShadowFreeChromaticity& shadow_free,
                      const MultiChannelImage& original) {
  check_grid(shadow_free.image, original, "fit_l1_mapping");
  if (shadow_free.image.depth() != original.channels() - 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "shadow-free chromaticity has " + std::to_string(shadow_free.image.depth()) +
                    " dims for a " + std::to_string(original.channels()) + "-channel image");
  }
}

}  // namespace

std::vector<double> normalize_display(std::span<const double> values, double low_pct,
                                      double high_pct) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "nothing to normalize");
  if (!(low_pct >= 0.0 && high_pct <= 100.0 && high_pct > low_pct)) {
    throw Error(ErrorCode::InvalidArgument, "display percentiles need 0 <= low < high <= 100");
  }
  const double lo = percentile(values, low_pct / 100.0);
  const double hi = percentile(values, high_pct / 100.0);
  std::vector<double> out(values.size());
  const double span = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (span > 0.0) {
      out[i] = std::clamp((v - lo) / span, 0.0, 1.0);
    } else {
      out[i] = v < lo ? 0.0 : (v > hi ? 1.0 : 0.5);
    }
  }
  return out;
}

PixelBuffer normalize_display(const PixelBuffer& image, const DisplayRange& range) {
  PixelBuffer out(image.width(), image.height(), image.depth());
  const auto stretched = normalize_display(image.values(), range.low_pct, range.high_pct);
  std::copy(stretched.begin(), stretched.end(), out.values().begin());
  return out;
}

ScalarField GrayInvariantImage::display() const {
  ScalarField out(raw.width(), raw.height());
  const auto stretched = normalize_display(raw.values(), range.low_pct, range.high_pct);
  std::copy(stretched.begin(), stretched.end(), out.values().begin());
  return out;
}

GrayInvariantImage grayscale_invariant(const ReducedChromaticityField& reduced,
                                       const ProjectionDirection& direction,
                                       const DisplayRange& range) {
  GrayInvariantImage inv;
  inv.raw = project_scalar(reduced, direction);
  for (double& v : inv.raw.values()) v = std::exp(v);
  inv.range = range;
  return inv;
}

Eigen::MatrixXd line_projector(const ProjectionDirection& direction) {
  const auto q = direction.vector();
  const int d = direction.dims();
  Eigen::MatrixXd p(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) p(r, c) = q[r] * q[c];
  }
  return p;
}

ShadowFreeChromaticity shadow_free_chromaticity(const ReducedChromaticityField& reduced,
                                                const ProjectionDirection& direction) {
  if (direction.dims() != reduced.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "shadow_free_chromaticity: direction dims");
  }
  const int d = reduced.dims();
  ShadowFreeChromaticity out;
  out.projector = line_projector(direction);
  out.projected_log = PixelBuffer(reduced.width(), reduced.height(), d);
  out.image = PixelBuffer(reduced.width(), reduced.height(), d);
  const auto q = direction.vector();
  for (std::size_t i = 0; i < reduced.pixel_count(); ++i) {
    const auto src = reduced.pixel(i);
    double coord = 0.0;
    for (int k = 0; k < d; ++k) coord += src[k] * q[k];
    auto log_dst = out.projected_log.pixel(i);
    auto dst = out.image.pixel(i);
    for (int k = 0; k < d; ++k) {
      log_dst[k] = coord * q[k];
      dst[k] = std::exp(log_dst[k]);
    }
  }
  return out;
}

L1Fit fit_l1_mapping(const ShadowFreeChromaticity& shadow_free,
                     const MultiChannelImage& original) {
  check_fit_inputs(shadow_free, original);
  const int d = shadow_free.image.depth();

  // Sufficient statistics A^T A (d x d) and A^T rho (d x 3).
  std::vector<CompensatedSum> gram(static_cast<std::size_t>(d * d));
  std::vector<CompensatedSum> cross(static_cast<std::size_t>(d * 3));
  double rho[3];
  for (std::size_t i = 0; i < original.pixel_count(); ++i) {
    const auto a = shadow_free.image.pixel(i);
    l1_pixel(original.pixel(i), kIntensityFloor, rho);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) gram[r * d + c].add(a[r] * a[c]);
      for (int c = 0; c < 3; ++c) cross[r * 3 + c].add(a[r] * rho[c]);
    }
  }
  Eigen::MatrixXd g(d, d);
  Eigen::MatrixXd rhs(d, 3);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) g(r, c) = gram[r * d + c].value();
    for (int c = 0; c < 3; ++c) rhs(r, c) = cross[r * 3 + c].value();
  }

  L1Fit fit;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(largest > 0.0) || smallest <= largest * 1e-13) {
    fit.rank_deficient = true;
    fit.mapping = g.completeOrthogonalDecomposition().solve(rhs);
  } else {
    fit.mapping = g.ldlt().solve(rhs);
  }
  fit.residual_sum_squares = l1_fit_residual(shadow_free, original, fit.mapping);
  return fit;
}

double l1_fit_residual(const ShadowFreeChromaticity& shadow_free,
                       const MultiChannelImage& original, const Eigen::MatrixXd& mapping) {
  check_fit_inputs(shadow_free, original);
  const int d = shadow_free.image.depth();
  if (mapping.rows() != d || mapping.cols() != 3) {
    throw Error(ErrorCode::DimensionMismatch, "mapping must be dims x 3");
  }
  CompensatedSum total;
  double rho[3];
  for (std::size_t i = 0; i < original.pixel_count(); ++i) {
    const auto a = shadow_free.image.pixel(i);
    l1_pixel(original.pixel(i), kIntensityFloor, rho);
    for (int c = 0; c < 3; ++c) {
      double pred = 0.0;
      for (int r = 0; r < d; ++r) pred += a[r] * mapping(r, c);
      const double e = rho[c] - pred;
      total.add(e * e);
    }
  }
  return total.value();
}

PixelBuffer ReconstructedImage::display(const DisplayRange& range) const {
  return normalize_display(reconstructed, range);
}

ReconstructedImage reconstruct_rgb(const ShadowFreeChromaticity& shadow_free,
                                   const Eigen::MatrixXd& mapping,
                                   const GrayInvariantImage& invariant) {
  check_grid(shadow_free.image, invariant.raw, "reconstruct_rgb");
  const int d = shadow_free.image.depth();
  if (mapping.rows() != d || mapping.cols() != 3) {
    throw Error(ErrorCode::DimensionMismatch, "mapping must be dims x 3");
  }
  const int w = invariant.raw.width();
  const int h = invariant.raw.height();
  ReconstructedImage out;
  out.mapping = mapping;
  out.approximation = PixelBuffer(w, h, 3);
  out.reconstructed = PixelBuffer(w, h, 3);
  out.projection_only = PixelBuffer(w, h, 3);
  for (std::size_t i = 0; i < invariant.raw.pixel_count(); ++i) {
    const auto a = shadow_free.image.pixel(i);
    auto approx = out.approximation.pixel(i);
    auto rec = out.reconstructed.pixel(i);
    auto proj = out.projection_only.pixel(i);
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int r = 0; r < d; ++r) v += a[r] * mapping(r, c);
      approx[c] = v;
      rec[c] = invariant.raw[i] * v;
      proj[c] = c < d ? a[c] : 0.0;
    }
  }
  return out;
}

}  // namespace rgbn
