#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgbn/image.hpp"
#include "rgbn/pipeline.hpp"
#include "rgbn/render.hpp"

namespace rgbn {

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// A shadowed sub-region and an equally sized lit sub-region of the same
/// surface.
struct RegionPair {
  std::string label;
  Rect shadow;
  Rect lit;

  friend bool operator==(const RegionPair&, const RegionPair&) = default;
};

/// One pair per line: `label sh_x sh_y w h nsh_x nsh_y`. '#' starts a comment.
std::vector<RegionPair> parse_regions(std::string_view text);
std::vector<RegionPair> load_regions(const std::filesystem::path& path);
std::string format_regions(std::span<const RegionPair> pairs);

/// Root-mean-square of the offset-aligned difference between the two
/// rectangles of an image already scaled to [0, 1], times 100.
double region_rmse(const ScalarField& normalized, const RegionPair& pair);

/// Applies the invariant's display stretch first.
double region_rmse(const GrayInvariantImage& invariant, const RegionPair& pair);

struct RegionComparison {
  std::string label;
  std::optional<double> rmse_rgbn;
  std::optional<double> rmse_rgb;
};

struct ComparisonReport {
  std::string image;
  std::vector<RegionComparison> regions;
  std::optional<double> mean_rgbn;  ///< mean over region pairs
  std::optional<double> mean_rgb;
  DisplayRange display;
  double grid_step_deg = 0.0;

  /// Fill mean_rgbn / mean_rgb from the per-region values.
  void aggregate();
};

/// Runs the pipeline on the 4-channel image and on its RGB channels and
/// measures every region pair in both invariant images.
ComparisonReport compare_pipelines(const MultiChannelImage& rgbn_image,
                                   std::span<const RegionPair> pairs,
                                   const PipelineOptions& options, std::string label = {});

/// Builds a report from invariants computed elsewhere; either may be absent.
ComparisonReport evaluate_invariants(const ScalarField* rgbn_normalized,
                                     const ScalarField* rgb_normalized,
                                     std::span<const RegionPair> pairs, std::string label = {});

/// CSV: image,region,rmse_rgbn,rmse_rgb (percent, 3 decimals); per-image
/// aggregate rows use region "mean". Missing values are left empty.
void write_report_csv(std::span<const ComparisonReport> reports, std::ostream& out);

/// Plain-text table with the columns Image Name | RMSE of RGBN | RMSE of RGB.
std::string format_report_table(std::span<const ComparisonReport> reports);

}  // namespace rgbn
