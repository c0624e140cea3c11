#include "rgbn/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rgbn/chromaticity.hpp"
#include "rgbn/error.hpp"

namespace rgbn {

namespace {

void check_inside(const PixelBuffer& image, const Rect& r, const std::string& label) {
  const bool ok = r.width >= 1 && r.height >= 1 && r.x >= 0 && r.y >= 0 &&
                  r.x + r.width <= image.width() && r.y + r.height <= image.height();
  if (!ok) {
    throw Error(ErrorCode::RegionOutOfBounds,
                "region '" + label + "' (" + std::to_string(r.x) + "," + std::to_string(r.y) + " " +
                    std::to_string(r.width) + "x" + std::to_string(r.height) +
                    ") leaves the " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + " image");
  }
}

std::string fixed3(const std::optional<double>& v) {
  if (!v) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::optional<double> mean_of(const std::vector<RegionComparison>& regions,
                              std::optional<double> RegionComparison::*member) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : regions) {
    if (r.*member) {
      sum += *(r.*member);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

std::vector<RegionPair> parse_regions(std::string_view text) {
  std::vector<RegionPair> pairs;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    RegionPair p;
    if (!(fields >> p.label)) continue;  // blank
    int sx, sy, w, h, nx, ny;
    if (!(fields >> sx >> sy >> w >> h >> nx >> ny)) {
      throw Error(ErrorCode::ParseError,
                  "regions line " + std::to_string(line_no) +
                      ": expected 'label sh_x sh_y w h nsh_x nsh_y'");
    }
    std::string extra;
    if (fields >> extra) {
      throw Error(ErrorCode::ParseError,
                  "regions line " + std::to_string(line_no) + ": unexpected '" + extra + "'");
    }
    p.shadow = Rect{sx, sy, w, h};
    p.lit = Rect{nx, ny, w, h};
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<RegionPair> load_regions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open regions file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_regions(ss.str());
}

std::string format_regions(std::span<const RegionPair> pairs) {
  std::ostringstream out;
  out << "# label sh_x sh_y w h nsh_x nsh_y\n";
  for (const auto& p : pairs) {
    out << p.label << ' ' << p.shadow.x << ' ' << p.shadow.y << ' ' << p.shadow.width << ' '
        << p.shadow.height << ' ' << p.lit.x << ' ' << p.lit.y << '\n';
  }
  return out.str();
}

double region_rmse(const ScalarField& normalized, const RegionPair& pair) {
  if (pair.shadow.width != pair.lit.width || pair.shadow.height != pair.lit.height) {
    throw Error(ErrorCode::SizeMismatch, "region '" + pair.label + "' rectangles differ in size");
  }
  check_inside(normalized, pair.shadow, pair.label);
  check_inside(normalized, pair.lit, pair.label);

  double ss = 0.0;
  for (int dy = 0; dy < pair.shadow.height; ++dy) {
    for (int dx = 0; dx < pair.shadow.width; ++dx) {
      const double d = normalized.at(pair.shadow.x + dx, pair.shadow.y + dy, 0) -
                       normalized.at(pair.lit.x + dx, pair.lit.y + dy, 0);
      ss += d * d;
    }
  }
  const double count = static_cast<double>(pair.shadow.width) * pair.shadow.height;
  return std::sqrt(ss / count) * 100.0;
}

double region_rmse(const GrayInvariantImage& invariant, const RegionPair& pair) {
  return region_rmse(invariant.display(), pair);
}

void ComparisonReport::aggregate() {
  mean_rgbn = mean_of(regions, &RegionComparison::rmse_rgbn);
  mean_rgb = mean_of(regions, &RegionComparison::rmse_rgb);
}

ComparisonReport compare_pipelines(const MultiChannelImage& rgbn_image,
                                   std::span<const RegionPair> pairs,
                                   const PipelineOptions& options, std::string label) {
  if (!rgbn_image.has_nir()) {
    throw Error(ErrorCode::UnsupportedChannelCount, "compare_pipelines needs an RGBN image");
  }
  const PipelineResult with_nir = run_pipeline(rgbn_image, options);
  const PipelineResult rgb_only = run_pipeline(drop_nir(rgbn_image), options);
  const ScalarField inv4 = with_nir.invariant.display();
  const ScalarField inv3 = rgb_only.invariant.display();

  ComparisonReport report = evaluate_invariants(&inv4, &inv3, pairs, std::move(label));
  report.display = options.display;
  report.grid_step_deg = options.grid_step_deg;
  return report;
}

ComparisonReport evaluate_invariants(const ScalarField* rgbn_normalized,
                                     const ScalarField* rgb_normalized,
                                     std::span<const RegionPair> pairs, std::string label) {
  ComparisonReport report;
  report.image = std::move(label);
  for (const auto& pair : pairs) {
    RegionComparison row;
    row.label = pair.label;
    if (rgbn_normalized) row.rmse_rgbn = region_rmse(*rgbn_normalized, pair);
    if (rgb_normalized) row.rmse_rgb = region_rmse(*rgb_normalized, pair);
    report.regions.push_back(std::move(row));
  }
  report.aggregate();
  return report;
}

void write_report_csv(std::span<const ComparisonReport> reports, std::ostream& out) {
  out << "image,region,rmse_rgbn,rmse_rgb\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.regions) {
      out << rep.image << ',' << r.label << ',' << fixed3(r.rmse_rgbn) << ',' << fixed3(r.rmse_rgb)
          << '\n';
    }
    out << rep.image << ",mean," << fixed3(rep.mean_rgbn) << ',' << fixed3(rep.mean_rgb) << '\n';
  }
}

std::string format_report_table(std::span<const ComparisonReport> reports) {
  std::size_t name_width = std::string("Image Name").size();
  for (const auto& rep : reports) name_width = std::max(name_width, rep.image.size());

  auto cell = [](const std::optional<double>& v, bool better) {
    std::string s = v ? fixed3(v) : std::string("-");
    if (better) s = "*" + s;
    return s;
  };

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s | %14s | %14s\n", static_cast<int>(name_width),
                "Image Name", "RMSE of RGBN", "RMSE of RGB");
  out << buf << std::string(name_width + 36, '-') << '\n';
  for (const auto& rep : reports) {
    const bool both = rep.mean_rgbn && rep.mean_rgb;
    const bool nir_wins = both && *rep.mean_rgbn < *rep.mean_rgb;
    const bool rgb_wins = both && *rep.mean_rgb < *rep.mean_rgbn;
    std::snprintf(buf, sizeof buf, "%-*s | %14s | %14s\n", static_cast<int>(name_width),
                  rep.image.c_str(), cell(rep.mean_rgbn, nir_wins).c_str(),
                  cell(rep.mean_rgb, rgb_wins).c_str());
    out << buf;
  }
  out << "(percent; * marks the lower RMSE)\n";
  return out.str();
}

}  // namespace rgbn
