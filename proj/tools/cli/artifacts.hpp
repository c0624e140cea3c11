#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "rgbn/image.hpp"
#include "rgbn/pipeline.hpp"

namespace rgbn::cli {

/// Grid nodes whose projected histograms are exported next to the optimum.
struct ReferenceNodes {
  std::size_t max_entropy = 0;
  std::size_t median_entropy = 0;
};

ReferenceNodes pick_reference_nodes(const EntropySurface& surface);

/// luminance.png, luminance_hist.csv and l1_chromaticity.png.
void write_input_views(const MultiChannelImage& image, const std::filesystem::path& dir);

/// Everything one pipeline run produces: invariant images and histogram,
/// entropy surface CSV and heatmap, reference histograms, shadow-free and
/// reconstructed images. Returns the direction summary also written to
/// direction.json.
nlohmann::json write_pipeline_artifacts(const PipelineResult& result, const PipelineOptions& options,
                                        const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace rgbn::cli
