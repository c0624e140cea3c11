#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "rgbn/image.hpp"

namespace rgbn {

/// Unit projection vector in the reduced chromaticity space.
///
/// Three-dimensional directions are parametrized by azimuth in [0, 180) and
/// elevation in [-90, 90] degrees as
///   q = [cos(el) cos(az), cos(el) sin(az), sin(el)].
/// Two-dimensional directions use one angle theta in [0, 180):
///   q = [cos(theta), sin(theta)].
/// Only half of the sphere (circle) is represented because q and -q give the
/// same projected entropy.
class ProjectionDirection {
 public:
  ProjectionDirection() = default;

  static ProjectionDirection from_theta(double theta_deg);
  static ProjectionDirection from_azimuth_elevation(double azimuth_deg, double elevation_deg);
  /// Normalizes `v` and flips its sign if needed so the angles fall into the
  /// canonical half-domain.
  static ProjectionDirection from_vector(std::span<const double> v);

  int dims() const noexcept { return dims_; }
  std::span<const double> vector() const noexcept {
    return {q_.data(), static_cast<std::size_t>(dims_)};
  }
  /// {theta} for dims 2, {azimuth, elevation} for dims 3, in degrees.
  std::vector<double> angles_deg() const;

 private:
  int dims_ = 0;
  std::array<double, 3> q_{};
  std::array<double, 2> angles_{};
};

/// Builds a direction from one angle (theta) or two (azimuth, elevation).
/// Throws OutOfRange if an angle leaves its domain.
ProjectionDirection direction_from_angles(std::span<const double> angles_deg);

/// Angle between the lines spanned by two directions, in degrees (0..90).
double angular_distance_deg(const ProjectionDirection& a, const ProjectionDirection& b);

/// Per-pixel dot product of the reduced chromaticity with q.
ScalarField project_scalar(const ReducedChromaticityField& reduced, const ProjectionDirection& dir);

/// Scott's normal-reference rule, 3.49 * s * n^(-1/3) with the (n-1) sample
/// standard deviation. Throws DegenerateDistribution when s == 0.
double scotts_bin_width(std::span<const double> samples);

inline constexpr double kScottConstant = 3.49;

struct HistogramSpec {
  /// Fraction trimmed from each tail before binning.
  double trim = 0.05;
};

struct Histogram {
  double lower = 0.0;      ///< left edge of the first bin
  double bin_width = 0.0;  ///< 0 for the degenerate single-bin case
  std::vector<std::uint64_t> counts;
  std::size_t retained = 0;  ///< samples inside the trim window

  std::size_t bin_count() const noexcept { return counts.size(); }
  std::vector<double> edges() const;
  std::vector<double> centers() const;
};

/// Linear-interpolation percentile (fraction in [0, 1]) of unsorted data.
double percentile(std::span<const double> samples, double fraction);

/// Keep samples within the [trim, 1 - trim] percentile window (inclusive) and
/// split their range into ceil(range / Scott width) equal bins.
/// Degenerate inputs (constant, or fewer than two retained samples) produce
/// one bin.
Histogram build_histogram(std::span<const double> samples, const HistogramSpec& spec = {});

/// Shannon entropy, in bits, of the non-empty bins.
double entropy_bits(const Histogram& histogram);

/// entropy_bits(build_histogram(samples, spec)). Throws EmptyInput on no data.
double trimmed_entropy(std::span<const double> samples, const HistogramSpec& spec = {});
double trimmed_entropy(const ScalarField& scalar, const HistogramSpec& spec = {});

/// Entropy sampled on the half-sphere grid (or the half-circle for dims 2).
/// Cells are stored azimuth-major: value(ia, ie) = values[ia * elevations + ie].
struct EntropySurface {
  int dims = 0;
  double step_deg = 0.0;
  std::vector<double> azimuths_deg;    ///< theta for dims 2
  std::vector<double> elevations_deg;  ///< single 0 entry for dims 2
  std::vector<double> entropy;
  std::vector<std::uint32_t> bins;
  std::size_t argmin = 0;

  std::size_t cell(std::size_t ia, std::size_t ie) const noexcept {
    return ia * elevations_deg.size() + ie;
  }
  double min_entropy() const { return entropy.at(argmin); }
  ProjectionDirection direction_at(std::size_t cell_index) const;
};

struct SearchResult {
  ProjectionDirection direction;
  EntropySurface surface;
};

/// Exhaustive grid search for the direction minimizing trimmed entropy of
/// the projected reduced chromaticities. Ties go to the first cell in
/// (azimuth, elevation) order.
SearchResult find_optimal_direction(const ReducedChromaticityField& reduced, double grid_step_deg,
                                    const HistogramSpec& spec = {});

/// CSV with a header and 6-decimal fixed rows: "azimuth_deg,elevation_deg,entropy_bits"
/// (or "theta_deg,entropy_bits" for dims 2).
void write_surface_csv(const EntropySurface& surface, std::ostream& out);

/// Heatmap in [0, 1] (low entropy dark). Rows run from +90 deg elevation at the
/// top to -90 at the bottom; a dims-2 surface becomes a 16-row strip.
ScalarField surface_heatmap(const EntropySurface& surface);

/// "bin_center,count" rows, 6-decimal centers.
void write_histogram_csv(const Histogram& histogram, std::ostream& out);

}  // namespace rgbn
