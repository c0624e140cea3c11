#include "artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <vector>

#include "rgbn/chromaticity.hpp"
#include "rgbn/entropy.hpp"
#include "rgbn/error.hpp"
#include "rgbn/image_io.hpp"
#include "rgbn/render.hpp"

namespace rgbn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

json direction_json(const ProjectionDirection& d) {
  json j;
  j["vector"] = std::vector<double>(d.vector().begin(), d.vector().end());
  const auto a = d.angles_deg();
  if (d.dims() == 2) {
    j["theta_deg"] = a[0];
  } else {
    j["azimuth_deg"] = a[0];
    j["elevation_deg"] = a[1];
  }
  return j;
}

void write_projection_hist(const ReducedChromaticityField& reduced, const ProjectionDirection& dir,
                           double trim, const fs::path& path) {
  const auto projected = project_scalar(reduced, dir);
  auto out = open_out(path);
  write_histogram_csv(build_histogram(projected.values(), HistogramSpec{trim}), out);
}

}  // namespace

ReferenceNodes pick_reference_nodes(const EntropySurface& surface) {
  std::vector<std::size_t> order(surface.entropy.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable so equal entropies keep grid order and the choice is reproducible.
  std::stable_sort(order.begin(), order.end(), [&surface](std::size_t a, std::size_t b) {
    return surface.entropy[a] < surface.entropy[b];
  });
  ReferenceNodes nodes;
  nodes.max_entropy = order.back();
  nodes.median_entropy = order[order.size() / 2];
  return nodes;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_json(const fs::path& path, const json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

void write_input_views(const MultiChannelImage& image, const fs::path& dir) {
  fs::create_directories(dir);
  const auto lum = luminance(image);
  write_image(dir / "luminance.png", normalize_display(lum));
  {
    auto out = open_out(dir / "luminance_hist.csv");
    write_histogram_csv(build_histogram(lum.values(), HistogramSpec{0.0}), out);
  }
  write_image(dir / "l1_chromaticity.png", l1_chromaticity(image));
}

json write_pipeline_artifacts(const PipelineResult& r, const PipelineOptions& options,
                              const fs::path& dir) {
  fs::create_directories(dir);
  const auto& surface = r.search.surface;

  const auto invariant_display = r.invariant.display();
  write_image(dir / "invariant.png", invariant_display);
  write_image(dir / "invariant.tif", invariant_display);
  write_projection_hist(r.reduced, r.search.direction, options.trim, dir / "invariant_hist.csv");

  {
    auto out = open_out(dir / "entropy_surface.csv");
    write_surface_csv(surface, out);
  }
  write_image(dir / "entropy_heatmap.png", surface_heatmap(surface));

  const auto nodes = pick_reference_nodes(surface);
  const auto max_dir = surface.direction_at(nodes.max_entropy);
  const auto median_dir = surface.direction_at(nodes.median_entropy);
  write_projection_hist(r.reduced, max_dir, options.trim, dir / "hist_max_entropy.csv");
  write_projection_hist(r.reduced, median_dir, options.trim, dir / "hist_median_entropy.csv");

  const auto shadow_free = normalize_display(r.reconstruction.projection_only, options.display);
  write_image(dir / "shadow_free.png", shadow_free);
  write_image(dir / "shadow_free.tif", shadow_free);
  const auto reconstructed = r.reconstruction.display(options.display);
  write_image(dir / "reconstructed.png", reconstructed);
  write_image(dir / "reconstructed.tif", reconstructed);

  json j;
  j["dims"] = surface.dims;
  j["grid_step_deg"] = surface.step_deg;
  j["trim"] = options.trim;
  j["norm_pcts"] = {options.display.low_pct, options.display.high_pct};
  j["direction"] = direction_json(r.search.direction);
  j["entropy_bits"] = {
      {"optimum", surface.min_entropy()},
      {"max_node", surface.entropy[nodes.max_entropy]},
      {"median_node", surface.entropy[nodes.median_entropy]},
  };
  j["bins_at_optimum"] = surface.bins[surface.argmin];
  j["max_entropy_direction"] = direction_json(max_dir);
  j["median_entropy_direction"] = direction_json(median_dir);
  json mapping = json::array();
  for (Eigen::Index row = 0; row < r.fit.mapping.rows(); ++row) {
    std::vector<double> vals;
    for (Eigen::Index col = 0; col < r.fit.mapping.cols(); ++col) {
      vals.push_back(r.fit.mapping(row, col));
    }
    mapping.push_back(vals);
  }
  j["l1_mapping"] = mapping;
  j["l1_rank_deficient"] = r.fit.rank_deficient;
  j["l1_residual_sum_squares"] = r.fit.residual_sum_squares;
  write_json(dir / "direction.json", j);
  return j;
}

}  // namespace rgbn::cli
