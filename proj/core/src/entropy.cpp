#include "rgbn/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>

#include "rgbn/error.hpp"

namespace rgbn {

namespace {

// sin/cos of an angle in degrees, exact at multiples of 90.
std::pair<double, double> sincos_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r == 0.0) return {0.0, 1.0};
  if (r == 90.0) return {1.0, 0.0};
  if (r == 180.0) return {0.0, -1.0};
  if (r == 270.0) return {-1.0, 0.0};
  const double rad = r * std::numbers::pi / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Percentile on a scratch buffer that may be reordered.
double percentile_inplace(std::vector<double>& work, double fraction) {
  const std::size_t n = work.size();
  const double pos = fraction * static_cast<double>(n - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(k);
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k), work.end());
  const double lo = work[k];
  if (frac <= 0.0 || k + 1 >= n) return lo;
  const double hi = *std::min_element(work.begin() + static_cast<std::ptrdiff_t>(k + 1), work.end());
  return lo + frac * (hi - lo);
}

void check_trim(double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) {
    throw Error(ErrorCode::InvalidArgument,
                "trim fraction must lie in [0, 0.5), got " + std::to_string(trim));
  }
}

// Reusable scratch space so the grid search does not allocate per direction.
class HistogramBuilder {
 public:
  Histogram build(std::span<const double> samples, const HistogramSpec& spec) {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples to histogram");
    check_trim(spec.trim);

    double lo = 0.0;
    double hi = 0.0;
    work_.assign(samples.begin(), samples.end());
    if (spec.trim > 0.0) {
      lo = percentile_inplace(work_, spec.trim);
      hi = percentile_inplace(work_, 1.0 - spec.trim);
    } else {
      const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
      lo = *mn;
      hi = *mx;
    }

    retained_.clear();
    for (double x : samples) {
      if (x >= lo && x <= hi) retained_.push_back(x);
    }

    Histogram h;
    h.retained = retained_.size();
    if (retained_.empty()) {
      h.lower = lo;
      h.counts = {0};
      return h;
    }
    const auto [mn, mx] = std::minmax_element(retained_.begin(), retained_.end());
    h.lower = *mn;
    const double range = *mx - *mn;

    double scott = 0.0;
    if (retained_.size() >= 2 && range > 0.0) {
      try {
        scott = scotts_bin_width(retained_);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDistribution) throw;
      }
    }
    if (scott <= 0.0) {
      h.counts = {static_cast<std::uint64_t>(retained_.size())};
      return h;
    }

    // Scott's width caps the bin size; bins are equal-width over the retained
    // range so that mirrored data produces a mirrored histogram.
    const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(range / scott)));
    h.bin_width = range / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double x : retained_) {
      auto idx = static_cast<std::size_t>((x - h.lower) / h.bin_width);
      if (idx >= bins) idx = bins - 1;
      ++h.counts[idx];
    }
    return h;
  }

 private:
  std::vector<double> work_;
  std::vector<double> retained_;
};

}  // namespace

ProjectionDirection ProjectionDirection::from_theta(double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg < 180.0)) {
    throw Error(ErrorCode::OutOfRange, "theta must lie in [0, 180), got " + std::to_string(theta_deg));
  }
  ProjectionDirection d;
  d.dims_ = 2;
  const auto [s, c] = sincos_deg(theta_deg);
  d.q_ = {c, s, 0.0};
  d.angles_ = {theta_deg, 0.0};
  return d;
}

ProjectionDirection ProjectionDirection::from_azimuth_elevation(double azimuth_deg,
                                                                double elevation_deg) {
  if (!(azimuth_deg >= 0.0 && azimuth_deg < 180.0)) {
    throw Error(ErrorCode::OutOfRange,
                "azimuth must lie in [0, 180), got " + std::to_string(azimuth_deg));
  }
  if (!(elevation_deg >= -90.0 && elevation_deg <= 90.0)) {
    throw Error(ErrorCode::OutOfRange,
                "elevation must lie in [-90, 90], got " + std::to_string(elevation_deg));
  }
  ProjectionDirection d;
  d.dims_ = 3;
  const auto [sa, ca] = sincos_deg(azimuth_deg);
  const auto [se, ce] = sincos_deg(elevation_deg);
  d.q_ = {ce * ca, ce * sa, se};
  d.angles_ = {azimuth_deg, elevation_deg};
  return d;
}

ProjectionDirection ProjectionDirection::from_vector(std::span<const double> v) {
  if (v.size() != 2 && v.size() != 3) {
    throw Error(ErrorCode::DimensionMismatch,
                "direction vectors have 2 or 3 components, got " + std::to_string(v.size()));
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidArgument, "direction vector must be finite and nonzero");
  }

  ProjectionDirection d;
  d.dims_ = static_cast<int>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d.q_[i] = v[i] / norm;

  auto flip = [&d] {
    for (double& x : d.q_) x = -x;
  };

  if (d.dims_ == 2) {
    double theta = rad_to_deg(std::atan2(d.q_[1], d.q_[0]));
    if (theta < 0.0) theta += 360.0;
    if (theta >= 180.0) {
      flip();
      theta -= 180.0;
    }
    if (theta >= 180.0 || theta < 0.0) theta = 0.0;  // rounding at the seam
    d.angles_ = {theta, 0.0};
    return d;
  }

  double az = 0.0;
  if (d.q_[0] != 0.0 || d.q_[1] != 0.0) {
    az = rad_to_deg(std::atan2(d.q_[1], d.q_[0]));
    if (az < 0.0) az += 360.0;
    if (az >= 180.0) {
      flip();
      az -= 180.0;
    }
    if (az >= 180.0 || az < 0.0) az = 0.0;
  }
  const double el = rad_to_deg(std::asin(std::clamp(d.q_[2], -1.0, 1.0)));
  d.angles_ = {az, el};
  return d;
}

std::vector<double> ProjectionDirection::angles_deg() const {
  if (dims_ == 2) return {angles_[0]};
  if (dims_ == 3) return {angles_[0], angles_[1]};
  return {};
}

ProjectionDirection direction_from_angles(std::span<const double> angles_deg) {
  if (angles_deg.size() == 1) return ProjectionDirection::from_theta(angles_deg[0]);
  if (angles_deg.size() == 2) {
    return ProjectionDirection::from_azimuth_elevation(angles_deg[0], angles_deg[1]);
  }
  throw Error(ErrorCode::InvalidArgument,
              "expected 1 or 2 angles, got " + std::to_string(angles_deg.size()));
}

double angular_distance_deg(const ProjectionDirection& a, const ProjectionDirection& b) {
  if (a.dims() != b.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "directions of different dimension");
  }
  double dot = 0.0;
  for (int i = 0; i < a.dims(); ++i) dot += a.vector()[i] * b.vector()[i];
  return rad_to_deg(std::acos(std::min(1.0, std::abs(dot))));
}

ScalarField project_scalar(const ReducedChromaticityField& reduced,
                           const ProjectionDirection& dir) {
  if (dir.dims() != reduced.dims()) {
    throw Error(ErrorCode::DimensionMismatch,
                "direction has " + std::to_string(dir.dims()) + " dims, field has " +
                    std::to_string(reduced.dims()));
  }
  ScalarField out(reduced.width(), reduced.height());
  const auto q = dir.vector();
  for (std::size_t i = 0; i < reduced.pixel_count(); ++i) {
    const auto p = reduced.pixel(i);
    double acc = 0.0;
    for (int k = 0; k < reduced.dims(); ++k) acc += p[k] * q[k];
    out[i] = acc;
  }
  return out;
}

double scotts_bin_width(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "Scott's rule needs at least two samples");
  }
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    throw Error(ErrorCode::DegenerateDistribution, "zero standard deviation");
  }
  return kScottConstant * sd * std::pow(static_cast<double>(n), -1.0 / 3.0);
}

std::vector<double> Histogram::edges() const {
  std::vector<double> e(counts.size() + 1);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = lower + bin_width * static_cast<double>(i);
  }
  return e;
}

std::vector<double> Histogram::centers() const {
  std::vector<double> c(counts.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = lower + bin_width * (static_cast<double>(i) + 0.5);
  }
  return c;
}

double percentile(std::span<const double> samples, double fraction) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "percentile of no samples");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "percentile fraction outside [0, 1]");
  }
  std::vector<double> work(samples.begin(), samples.end());
  return percentile_inplace(work, fraction);
}

Histogram build_histogram(std::span<const double> samples, const HistogramSpec& spec) {
  HistogramBuilder builder;
  return builder.build(samples, spec);
}

double entropy_bits(const Histogram& histogram) {
  std::uint64_t total = 0;
  for (auto c : histogram.counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : histogram.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double trimmed_entropy(std::span<const double> samples, const HistogramSpec& spec) {
  return entropy_bits(build_histogram(samples, spec));
}

double trimmed_entropy(const ScalarField& scalar, const HistogramSpec& spec) {
  return trimmed_entropy(scalar.values(), spec);
}

ProjectionDirection EntropySurface::direction_at(std::size_t cell_index) const {
  const std::size_t n_el = elevations_deg.size();
  const std::size_t ia = cell_index / n_el;
  const std::size_t ie = cell_index % n_el;
  if (dims == 2) return ProjectionDirection::from_theta(azimuths_deg.at(ia));
  return ProjectionDirection::from_azimuth_elevation(azimuths_deg.at(ia), elevations_deg.at(ie));
}

SearchResult find_optimal_direction(const ReducedChromaticityField& reduced, double grid_step_deg,
                                    const HistogramSpec& spec) {
  if (!(grid_step_deg > 0.0 && grid_step_deg <= 180.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "grid step must lie in (0, 180] degrees, got " + std::to_string(grid_step_deg));
  }
  if (reduced.empty()) throw Error(ErrorCode::EmptyInput, "empty reduced field");
  const int dims = reduced.dims();
  if (dims != 2 && dims != 3) {
    throw Error(ErrorCode::DimensionMismatch,
                "entropy search supports 2 or 3 reduced dims, got " + std::to_string(dims));
  }
  check_trim(spec.trim);

  EntropySurface surface;
  surface.dims = dims;
  surface.step_deg = grid_step_deg;
  for (std::size_t k = 0;; ++k) {
    const double a = static_cast<double>(k) * grid_step_deg;
    if (a >= 180.0 - 1e-9) break;
    surface.azimuths_deg.push_back(a);
  }
  if (dims == 3) {
    for (std::size_t k = 0;; ++k) {
      const double e = -90.0 + static_cast<double>(k) * grid_step_deg;
      if (e > 90.0 + 1e-9) break;
      surface.elevations_deg.push_back(std::min(e, 90.0));
    }
    if (surface.elevations_deg.back() < 90.0) surface.elevations_deg.push_back(90.0);
  } else {
    surface.elevations_deg = {0.0};
  }

  const std::size_t n_az = surface.azimuths_deg.size();
  const std::size_t n_el = surface.elevations_deg.size();
  surface.entropy.assign(n_az * n_el, 0.0);
  surface.bins.assign(n_az * n_el, 0);

  const std::size_t n_pix = reduced.pixel_count();
  const auto data = reduced.values();

  auto evaluate_column = [&](std::size_t ia, HistogramBuilder& builder,
                             std::vector<double>& projected) {
    for (std::size_t ie = 0; ie < n_el; ++ie) {
      const double el = surface.elevations_deg[ie];
      const bool pole = dims == 3 && std::abs(el) == 90.0;
      if (pole && ia != 0) continue;  // filled from column 0 afterwards
      const ProjectionDirection dir =
          dims == 2 ? ProjectionDirection::from_theta(surface.azimuths_deg[ia])
                    : ProjectionDirection::from_azimuth_elevation(surface.azimuths_deg[ia], el);
      const auto q = dir.vector();
      for (std::size_t i = 0; i < n_pix; ++i) {
        const double* p = data.data() + i * static_cast<std::size_t>(dims);
        double acc = 0.0;
        for (int k = 0; k < dims; ++k) acc += p[k] * q[k];
        projected[i] = acc;
      }
      const Histogram h = builder.build(projected, spec);
      surface.entropy[surface.cell(ia, ie)] = entropy_bits(h);
      surface.bins[surface.cell(ia, ie)] = static_cast<std::uint32_t>(h.bin_count());
    }
  };

  // Columns are independent; each worker owns its scratch buffers and writes
  // disjoint cells, and the argmin is taken serially afterwards.
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(n_az)));
  auto run_range = [&](std::size_t begin, std::size_t stride) {
    HistogramBuilder builder;
    std::vector<double> projected(n_pix);
    for (std::size_t ia = begin; ia < n_az; ia += stride) evaluate_column(ia, builder, projected);
  };
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
  }

  if (dims == 3) {
    for (std::size_t ie = 0; ie < n_el; ++ie) {
      if (std::abs(surface.elevations_deg[ie]) != 90.0) continue;
      for (std::size_t ia = 1; ia < n_az; ++ia) {
        surface.entropy[surface.cell(ia, ie)] = surface.entropy[surface.cell(0, ie)];
        surface.bins[surface.cell(ia, ie)] = surface.bins[surface.cell(0, ie)];
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < surface.entropy.size(); ++c) {
    if (surface.entropy[c] < surface.entropy[best]) best = c;
  }
  surface.argmin = best;

  SearchResult result;
  result.direction = surface.direction_at(best);
  result.surface = std::move(surface);
  return result;
}

void write_surface_csv(const EntropySurface& surface, std::ostream& out) {
  char line[128];
  if (surface.dims == 2) {
    out << "theta_deg,entropy_bits\n";
    for (std::size_t ia = 0; ia < surface.azimuths_deg.size(); ++ia) {
      std::snprintf(line, sizeof line, "%.6f,%.6f\n", surface.azimuths_deg[ia],
                    surface.entropy[surface.cell(ia, 0)]);
      out << line;
    }
    return;
  }
  out << "azimuth_deg,elevation_deg,entropy_bits\n";
  for (std::size_t ia = 0; ia < surface.azimuths_deg.size(); ++ia) {
    for (std::size_t ie = 0; ie < surface.elevations_deg.size(); ++ie) {
      std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", surface.azimuths_deg[ia],
                    surface.elevations_deg[ie], surface.entropy[surface.cell(ia, ie)]);
      out << line;
    }
  }
}

ScalarField surface_heatmap(const EntropySurface& surface) {
  if (surface.entropy.empty()) throw Error(ErrorCode::EmptyInput, "empty entropy surface");
  const auto [mn, mx] = std::minmax_element(surface.entropy.begin(), surface.entropy.end());
  const double lo = *mn;
  const double span = *mx - *mn;
  auto shade = [&](double h) { return span > 0.0 ? (h - lo) / span : 0.5; };

  const int n_az = static_cast<int>(surface.azimuths_deg.size());
  const int n_el = static_cast<int>(surface.elevations_deg.size());
  if (surface.dims == 2) {
    ScalarField map(n_az, 16);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < n_az; ++x) map.at(x, y, 0) = shade(surface.entropy[surface.cell(x, 0)]);
    }
    return map;
  }
  ScalarField map(n_az, n_el);
  for (int y = 0; y < n_el; ++y) {
    const int ie = n_el - 1 - y;
    for (int x = 0; x < n_az; ++x) map.at(x, y, 0) = shade(surface.entropy[surface.cell(x, ie)]);
  }
  return map;
}

void write_histogram_csv(const Histogram& histogram, std::ostream& out) {
  out << "bin_center,count\n";
  const auto centers = histogram.centers();
  char line[96];
  for (std::size_t i = 0; i < centers.size(); ++i) {
    std::snprintf(line, sizeof line, "%.6f,%llu\n", centers[i],
                  static_cast<unsigned long long>(histogram.counts[i]));
    out << line;
  }
}

}  // namespace rgbn
