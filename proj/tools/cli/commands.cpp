#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "artifacts.hpp"
#include "rgbn/chromaticity.hpp"
#include "rgbn/error.hpp"
#include "rgbn/eval.hpp"
#include "rgbn/image_io.hpp"
#include "rgbn/pipeline.hpp"
#include "rgbn/render.hpp"
#include "rgbn/synth.hpp"

namespace rgbn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::mutex log_mutex;

void log_line(std::ostream& os, const std::string& line) {
  std::lock_guard lock(log_mutex);
  os << line << '\n' << std::flush;
}

bool wants_rgbn(Mode m) { return m == Mode::Rgbn || m == Mode::Both; }
bool wants_rgb(Mode m) { return m == Mode::Rgb || m == Mode::Both; }

void write_reports(const fs::path& dir, const std::vector<ComparisonReport>& reports) {
  fs::create_directories(dir);
  std::ostringstream csv;
  write_report_csv(reports, csv);
  write_text(dir / "report.csv", csv.str());
  write_text(dir / "report.txt", format_report_table(reports));
}

struct ItemOutcome {
  bool ok = false;
  std::string error;
  std::optional<ComparisonReport> report;
};

// File stems, made unique by suffixing a counter.
std::vector<std::string> item_names(const std::vector<InputItem>& inputs) {
  std::map<std::string, int> seen;
  std::vector<std::string> names;
  for (const auto& item : inputs) {
    std::string stem = item.rgb.stem().string();
    if (stem.empty()) stem = "image";
    const int n = ++seen[stem];
    names.push_back(n == 1 ? stem : stem + "_" + std::to_string(n));
  }
  return names;
}

ItemOutcome process_item(const InputItem& item, const std::string& name, const RunConfig& config) {
  ItemOutcome outcome;
  try {
    if (wants_rgbn(config.mode) && !item.nir) {
      throw Error(ErrorCode::InvalidArgument, "NIR required for rgbn mode");
    }
    const auto image = load_pair(item.rgb, item.nir, LoadOptions{config.linearize});
    const fs::path dir = config.out_dir / name;
    write_input_views(image, dir);

    std::optional<PipelineResult> rgbn, rgb;
    if (wants_rgbn(config.mode)) {
      rgbn = run_pipeline(image, config.pipeline);
      write_pipeline_artifacts(*rgbn, config.pipeline, dir / "rgbn");
    }
    if (wants_rgb(config.mode)) {
      rgb = run_pipeline(image.has_nir() ? drop_nir(image) : image, config.pipeline);
      write_pipeline_artifacts(*rgb, config.pipeline, dir / "rgb");
    }

    if (item.regions) {
      const auto pairs = load_regions(*item.regions);
      const auto rgbn_display = rgbn ? std::optional(rgbn->invariant.display()) : std::nullopt;
      const auto rgb_display = rgb ? std::optional(rgb->invariant.display()) : std::nullopt;
      auto report = evaluate_invariants(rgbn_display ? &*rgbn_display : nullptr,
                                        rgb_display ? &*rgb_display : nullptr, pairs, name);
      report.display = config.pipeline.display;
      report.grid_step_deg = config.pipeline.grid_step_deg;
      write_reports(dir, {report});
      outcome.report = std::move(report);
    }
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

std::string format_angles(const ProjectionDirection& d) {
  char buf[96];
  const auto a = d.angles_deg();
  if (d.dims() == 2) {
    std::snprintf(buf, sizeof buf, "theta=%.3f", a[0]);
  } else {
    std::snprintf(buf, sizeof buf, "az=%.3f el=%.3f", a[0], a[1]);
  }
  return buf;
}

}  // namespace

int run_invariant(const RunConfig& config) {
  if (config.synth_spec) return run_synth(config);
  config.validate();
  if (config.inputs.empty()) {
    log_line(std::cerr, "error: no inputs (use --rgb, --batch or a config file)");
    return 2;
  }

  const auto names = item_names(config.inputs);
  std::vector<ItemOutcome> outcomes(config.inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.inputs.size(); i = next++) {
      log_line(std::cerr, "[" + names[i] + "] processing " + config.inputs[i].rgb.string());
      outcomes[i] = process_item(config.inputs[i], names[i], config);
      if (outcomes[i].ok) {
        log_line(std::cerr, "[" + names[i] + "] done");
      } else {
        log_line(std::cerr, "[" + names[i] + "] error: " + outcomes[i].error);
      }
    }
  };
  {
    const int threads = std::min<int>(config.jobs, static_cast<int>(config.inputs.size()));
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<ComparisonReport> reports;
  int failures = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) ++failures;
    if (o.report) reports.push_back(*o.report);
  }
  if (!reports.empty()) {
    write_reports(config.out_dir, reports);
    std::cout << format_report_table(reports);
  }
  if (failures > 0) {
    log_line(std::cerr, std::to_string(failures) + " of " + std::to_string(outcomes.size()) +
                            " inputs failed");
    return 1;
  }
  return 0;
}

int run_synth(const RunConfig& config) {
  config.validate();
  try {
    const fs::path spec_path = *config.synth_spec;
    const auto spec = load_scene_spec(spec_path);
    const auto scene = generate_scene(spec);
    const std::string stem = spec_path.stem().string();
    const fs::path dir = config.out_dir / stem;
    write_scene(scene, dir / "scene", stem);
    write_input_views(scene.image, dir);

    const bool has_nir = scene.image.has_nir();
    if (wants_rgbn(config.mode) && !has_nir) {
      throw Error(ErrorCode::InvalidArgument, "NIR required for rgbn mode");
    }
    const auto pairs = derive_region_pairs(scene);

    json oracle;
    oracle["scene"] = stem;
    std::optional<ScalarField> rgbn_display, rgb_display;
    auto run_mode = [&](const MultiChannelImage& image, const std::string& mode) {
      const auto r = run_pipeline(image, config.pipeline);
      auto summary = write_pipeline_artifacts(r, config.pipeline, dir / mode);
      const auto check = check_direction(scene, r.search.direction, r.invariant.raw);
      const auto& truth = check.dims == scene.true_direction.dims() ? scene.true_direction
                                                                    : scene.true_direction_rgb;
      oracle[mode] = {
          {"found", summary["direction"]},
          {"true_angles_deg", truth.angles_deg()},
          {"angle_error_deg", check.angle_error_deg},
          {"invariant_deviation_deg", check.invariant_deviation_deg},
          {"max_relative_spread", check.max_relative_spread},
          {"entropy_bits", summary["entropy_bits"]},
      };
      char line[256];
      std::snprintf(line, sizeof line,
                    "%s: found %s, true %s, angle error %.3f deg, off-invariant %.3f deg, "
                    "max relative spread %.3e",
                    mode.c_str(), format_angles(r.search.direction).c_str(),
                    format_angles(truth).c_str(), check.angle_error_deg,
                    check.invariant_deviation_deg, check.max_relative_spread);
      std::cout << line << '\n';
      return r.invariant.display();
    };
    if (wants_rgbn(config.mode)) rgbn_display = run_mode(scene.image, "rgbn");
    if (wants_rgb(config.mode)) {
      rgb_display = run_mode(has_nir ? drop_nir(scene.image) : scene.image, "rgb");
    }

    if (!pairs.empty()) {
      auto report = evaluate_invariants(rgbn_display ? &*rgbn_display : nullptr,
                                        rgb_display ? &*rgb_display : nullptr, pairs, stem);
      report.display = config.pipeline.display;
      report.grid_step_deg = config.pipeline.grid_step_deg;
      write_reports(dir, {report});
      if (report.mean_rgbn) oracle["mean_rmse_rgbn"] = *report.mean_rgbn;
      if (report.mean_rgb) oracle["mean_rmse_rgb"] = *report.mean_rgb;
      std::cout << format_report_table(std::vector{report});
    }
    write_json(dir / "oracle.json", oracle);
  } catch (const std::exception& e) {
    log_line(std::cerr, std::string("error: ") + e.what());
    return 1;
  }
  return 0;
}

int run_eval(const EvalConfig& config) {
  try {
    if (!config.rgbn_invariant && !config.rgb_invariant) {
      throw Error(ErrorCode::InvalidArgument, "give --rgbn and/or --rgb invariant images");
    }
    const auto pairs = load_regions(config.regions);
    auto load = [&config](const std::optional<fs::path>& p) -> std::optional<ScalarField> {
      if (!p) return std::nullopt;
      auto img = load_gray(*p);
      if (!config.stretch) return img;
      ScalarField stretched(img.width(), img.height());
      const auto v = normalize_display(img.values(), config.display.low_pct,
                                       config.display.high_pct);
      std::copy(v.begin(), v.end(), stretched.values().begin());
      return stretched;
    };
    const auto rgbn = load(config.rgbn_invariant);
    const auto rgb = load(config.rgb_invariant);
    std::string label = config.label;
    if (label.empty()) {
      label = (config.rgbn_invariant ? *config.rgbn_invariant : *config.rgb_invariant)
                  .parent_path()
                  .filename()
                  .string();
    }
    auto report = evaluate_invariants(rgbn ? &*rgbn : nullptr, rgb ? &*rgb : nullptr, pairs, label);
    report.display = config.display;
    write_reports(config.out_dir, {report});
    std::cout << format_report_table(std::vector{report});
  } catch (const std::exception& e) {
    log_line(std::cerr, std::string("error: ") + e.what());
    return 1;
  }
  return 0;
}

}  // namespace rgbn::cli
