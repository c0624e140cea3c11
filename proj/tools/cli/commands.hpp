#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "run_config.hpp"

namespace rgbn::cli {

/// Main pipeline over every input pair. Returns the process exit status.
int run_invariant(const RunConfig& config);

/// Renders a synthetic scene, runs the requested modes on it and compares
/// the found directions with the ground truth.
int run_synth(const RunConfig& config);

struct EvalConfig {
  std::filesystem::path regions;
  std::optional<std::filesystem::path> rgbn_invariant;
  std::optional<std::filesystem::path> rgb_invariant;
  std::string label;
  /// Apply the percentile stretch instead of using the stored [0, 1] values.
  bool stretch = false;
  DisplayRange display;
  std::filesystem::path out_dir = "out";
};

/// Region RMSEs on precomputed invariant images.
int run_eval(const EvalConfig& config);

}  // namespace rgbn::cli
