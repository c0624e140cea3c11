#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "rgbn/error.hpp"
#include "rgbn/keyvalue.hpp"
#include "run_config.hpp"

namespace {

using rgbn::cli::RunConfig;

// Pipeline flags shared by `invariant` and `synth`. Values land in the
// struct only when given, so they override whatever a config file set.
struct PipelineFlags {
  std::string config_path;
  double grid_step = 0.0;
  double trim = 0.0;
  std::vector<double> norm_pcts;
  std::string mode;
  std::string out;
  int jobs = 1;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* trim_opt = nullptr;
  CLI::Option* norm_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* linearize_opt = nullptr;
  bool linearize = true;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "key = value run configuration file")
        ->check(CLI::ExistingFile);
    grid_opt = cmd.add_option("--grid-step", grid_step, "search grid step in degrees (default 1)");
    trim_opt = cmd.add_option("--trim", trim, "histogram tail trim fraction (default 0.05)");
    norm_opt = cmd.add_option("--norm-pcts", norm_pcts, "display stretch percentiles LOW HIGH")
                   ->expected(2);
    mode_opt = cmd.add_option("--mode", mode, "rgbn, rgb or both (default both)")
                   ->check(CLI::IsMember({"rgbn", "rgb", "both"}));
    out_opt = cmd.add_option("--out", out, "output root (default $RGBN_OUT_DIR or ./out)");
    jobs_opt = cmd.add_option("--jobs", jobs, "batch items processed in parallel");
    linearize_opt = cmd.add_flag("--linearize,!--no-linearize", linearize,
                                 "decode sRGB to linear intensities (default on)");
  }

  RunConfig build() const {
    RunConfig config;
    config.out_dir = rgbn::cli::default_out_dir();
    if (!config_path.empty()) {
      rgbn::cli::apply_config_file(rgbn::KeyValueConfig::load(config_path), config);
    }
    if (grid_opt->count()) config.pipeline.grid_step_deg = grid_step;
    if (trim_opt->count()) config.pipeline.trim = trim;
    if (norm_opt->count()) config.pipeline.display = rgbn::DisplayRange{norm_pcts[0], norm_pcts[1]};
    if (mode_opt->count()) config.mode = rgbn::cli::parse_mode(mode);
    if (out_opt->count()) config.out_dir = out;
    if (jobs_opt->count()) config.jobs = jobs;
    if (linearize_opt->count()) config.linearize = linearize;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Illumination-invariant images from RGB and RGBN captures"};
  app.require_subcommand(1);

  auto* inv = app.add_subcommand("invariant", "run the pipeline on image pairs");
  inv->alias("run");
  PipelineFlags inv_flags;
  inv_flags.attach(*inv);
  std::vector<std::string> rgb_paths, nir_paths, region_paths;
  std::string batch_path, synth_path;
  inv->add_option("--rgb", rgb_paths, "RGB image (repeatable)");
  inv->add_option("--nir", nir_paths, "NIR image, paired with --rgb by order");
  inv->add_option("--regions", region_paths, "region pair file, paired with --rgb by order");
  inv->add_option("--batch", batch_path, "list file: rgb [nir [regions]] per line")
      ->check(CLI::ExistingFile);
  inv->add_option("--synth", synth_path, "scene spec; same as the synth subcommand")
      ->check(CLI::ExistingFile);

  auto* syn = app.add_subcommand("synth", "render a synthetic scene and check the search");
  PipelineFlags syn_flags;
  syn_flags.attach(*syn);
  std::string spec_path;
  syn->add_option("spec", spec_path, "scene spec file")->required()->check(CLI::ExistingFile);

  auto* ev = app.add_subcommand("eval", "region RMSE on precomputed invariant images");
  rgbn::cli::EvalConfig eval_config;
  std::string eval_regions, eval_rgbn, eval_rgb, eval_out;
  std::vector<double> eval_pcts;
  ev->add_option("--regions", eval_regions, "region pair file")->required()->check(CLI::ExistingFile);
  ev->add_option("--rgbn", eval_rgbn, "invariant image from the RGBN pipeline")
      ->check(CLI::ExistingFile);
  ev->add_option("--rgb", eval_rgb, "invariant image from the RGB pipeline")
      ->check(CLI::ExistingFile);
  ev->add_option("--label", eval_config.label, "image name in the report");
  ev->add_flag("--stretch", eval_config.stretch, "apply the percentile stretch before differencing");
  auto* eval_pcts_opt = ev->add_option("--norm-pcts", eval_pcts, "stretch percentiles LOW HIGH")
                            ->expected(2);
  auto* eval_out_opt = ev->add_option("--out", eval_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*inv) {
      auto config = inv_flags.build();
      if (!synth_path.empty()) config.synth_spec = synth_path;
      if (!nir_paths.empty() && nir_paths.size() != rgb_paths.size()) {
        std::cerr << "error: --nir must be given once per --rgb\n";
        return 2;
      }
      if (!region_paths.empty() && region_paths.size() != rgb_paths.size()) {
        std::cerr << "error: --regions must be given once per --rgb\n";
        return 2;
      }
      if (!rgb_paths.empty()) config.inputs.clear();
      for (std::size_t i = 0; i < rgb_paths.size(); ++i) {
        rgbn::cli::InputItem item;
        item.rgb = rgb_paths[i];
        if (!nir_paths.empty()) item.nir = nir_paths[i];
        if (!region_paths.empty()) item.regions = region_paths[i];
        config.inputs.push_back(std::move(item));
      }
      if (!batch_path.empty()) {
        for (auto& item : rgbn::cli::load_batch_list(batch_path)) {
          config.inputs.push_back(std::move(item));
        }
      }
      return rgbn::cli::run_invariant(config);
    }
    if (*syn) {
      auto config = syn_flags.build();
      config.synth_spec = spec_path;
      return rgbn::cli::run_synth(config);
    }
    if (*ev) {
      eval_config.regions = eval_regions;
      if (!eval_rgbn.empty()) eval_config.rgbn_invariant = eval_rgbn;
      if (!eval_rgb.empty()) eval_config.rgb_invariant = eval_rgb;
      if (eval_pcts_opt->count()) eval_config.display = rgbn::DisplayRange{eval_pcts[0], eval_pcts[1]};
      eval_config.out_dir = eval_out_opt->count() ? std::filesystem::path(eval_out)
                                                  : rgbn::cli::default_out_dir();
      return rgbn::cli::run_eval(eval_config);
    }
  } catch (const rgbn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
