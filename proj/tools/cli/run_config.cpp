#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rgbn/error.hpp"

namespace rgbn::cli {

Mode parse_mode(const std::string& text) {
  if (text == "rgbn") return Mode::Rgbn;
  if (text == "rgb") return Mode::Rgb;
  if (text == "both") return Mode::Both;
  throw Error(ErrorCode::InvalidArgument, "mode must be rgbn, rgb or both, got '" + text + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Rgbn: return "rgbn";
    case Mode::Rgb: return "rgb";
    case Mode::Both: return "both";
  }
  return "both";
}

void RunConfig::validate() const {
  pipeline.validate();
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be at least 1");
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("RGBN_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

namespace {

std::vector<std::string> string_list(const ConfigValue& value) {
  std::vector<std::string> out;
  if (value.is_string()) {
    out.push_back(value.as_string());
    return out;
  }
  for (const auto& v : value.as_array()) out.push_back(v.as_string());
  return out;
}

}  // namespace

void apply_config_file(const KeyValueConfig& file, RunConfig& config) {
  auto& p = config.pipeline;
  p.grid_step_deg = file.number_or("grid_step", p.grid_step_deg);
  p.trim = file.number_or("trim", p.trim);
  if (const auto pcts = file.find("norm_pcts")) {
    const auto v = pcts->as_numbers();
    if (v.size() != 2) throw Error(ErrorCode::ParseError, "norm_pcts needs two values");
    p.display = DisplayRange{v[0], v[1]};
  }
  if (const auto mode = file.find("mode")) config.mode = parse_mode(mode->as_string());
  config.linearize = file.bool_or("linearize", config.linearize);
  if (const auto out = file.find("out")) config.out_dir = out->as_string();
  config.jobs = file.int_or("jobs", config.jobs);
  if (const auto synth = file.find("synth")) config.synth_spec = synth->as_string();

  if (const auto rgb = file.find("inputs.rgb")) {
    const auto rgbs = string_list(*rgb);
    std::vector<std::string> nirs, regions;
    if (const auto n = file.find("inputs.nir")) nirs = string_list(*n);
    if (const auto r = file.find("inputs.regions")) regions = string_list(*r);
    if ((!nirs.empty() && nirs.size() != rgbs.size()) ||
        (!regions.empty() && regions.size() != rgbs.size())) {
      throw Error(ErrorCode::ParseError, "inputs.nir / inputs.regions must match inputs.rgb");
    }
    for (std::size_t i = 0; i < rgbs.size(); ++i) {
      InputItem item;
      item.rgb = rgbs[i];
      if (!nirs.empty() && !nirs[i].empty()) item.nir = nirs[i];
      if (!regions.empty() && !regions[i].empty()) item.regions = regions[i];
      config.inputs.push_back(std::move(item));
    }
  }
}

std::vector<InputItem> load_batch_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open batch list " + path.string());
  const auto base = path.parent_path();
  auto resolve = [&base](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s == "-") return std::nullopt;
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base / p;
  };

  std::vector<InputItem> items;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string f; fields >> f;) cols.push_back(f);
    if (cols.empty()) continue;
    if (cols.size() > 3 || cols[0] == "-") {
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected rgb [nir [regions]]");
    }
    InputItem item;
    item.rgb = *resolve(cols[0]);
    if (cols.size() > 1) item.nir = resolve(cols[1]);
    if (cols.size() > 2) item.regions = resolve(cols[2]);
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace rgbn::cli
