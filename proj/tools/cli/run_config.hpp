#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rgbn/keyvalue.hpp"
#include "rgbn/pipeline.hpp"

namespace rgbn::cli {

enum class Mode { Rgbn, Rgb, Both };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

struct InputItem {
  std::filesystem::path rgb;
  std::optional<std::filesystem::path> nir;
  std::optional<std::filesystem::path> regions;
};

struct RunConfig {
  std::vector<InputItem> inputs;
  PipelineOptions pipeline;
  Mode mode = Mode::Both;
  bool linearize = true;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> synth_spec;
  int jobs = 1;

  /// Throws rgbn::Error(InvalidArgument) on a bad combination of values.
  void validate() const;
};

/// Output root when neither the command line nor a config file names one.
std::filesystem::path default_out_dir();

/// Applies keys of a config file on top of `config`. Recognized keys:
/// grid_step, trim, norm_pcts, mode, linearize, out, jobs, synth, and the
/// parallel arrays inputs.rgb / inputs.nir / inputs.regions.
void apply_config_file(const KeyValueConfig& file, RunConfig& config);

/// Batch list: one item per line, `rgb [nir [regions]]`, whitespace
/// separated; "-" skips a column. Relative paths resolve against the list's
/// directory. '#' starts a comment.
std::vector<InputItem> load_batch_list(const std::filesystem::path& path);

}  // namespace rgbn::cli
