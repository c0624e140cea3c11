#include "rgbn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rgbn/error.hpp"
#include "rgbn/image_io.hpp"
#include "rgbn/keyvalue.hpp"

namespace rgbn {

namespace {

constexpr double kMinTemperature = 2500.0;
constexpr double kMaxTemperature = 10000.0;

double geometric_mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += std::log(x);
  return std::exp(acc / static_cast<double>(v.size()));
}

std::vector<double> normalized(std::vector<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void check_temperature(double t) {
  if (!(t >= kMinTemperature && t <= kMaxTemperature)) {
    throw Error(ErrorCode::OutOfRange,
                "temperature " + std::to_string(t) + " K outside the Wien window [2500, 10000]");
  }
}

void check_surface(const SurfaceSpec& s, const CameraModel& camera) {
  if (static_cast<int>(s.reflectance.size()) != camera.channels()) {
    throw Error(ErrorCode::DimensionMismatch,
                "surface " + std::to_string(s.id) + " has " + std::to_string(s.reflectance.size()) +
                    " reflectances for a " + std::to_string(camera.channels()) + "-channel camera");
  }
  for (double r : s.reflectance) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw Error(ErrorCode::OutOfRange,
                  "surface " + std::to_string(s.id) + " reflectance outside (0, 1]");
    }
  }
}

SurfaceSpec rgb_part(const SurfaceSpec& s) {
  SurfaceSpec out = s;
  out.reflectance.resize(3);
  return out;
}

}  // namespace

double wien_scale() {
  constexpr double peak_temperature = 6500.0;
  const double peak_lambda = kSecondRadiationConstant / (5.0 * peak_temperature);
  const double peak = std::pow(peak_lambda, -5.0) * std::exp(-5.0);
  return 0.8 / peak;
}

double wien_spd(double wavelength_nm, double temperature_k, double intensity) {
  check_temperature(temperature_k);
  if (!(wavelength_nm > 0.0)) throw Error(ErrorCode::OutOfRange, "wavelength must be positive");
  if (!(intensity > 0.0)) throw Error(ErrorCode::OutOfRange, "intensity must be positive");
  return intensity * wien_scale() * std::pow(wavelength_nm, -5.0) *
         std::exp(-kSecondRadiationConstant / (wavelength_nm * temperature_k));
}

void CameraModel::validate() const {
  if (channels() != 3 && channels() != 4) {
    throw Error(ErrorCode::UnsupportedChannelCount,
                "camera needs 3 or 4 channels, got " + std::to_string(channels()));
  }
  if (sensitivities.size() != wavelengths_nm.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one sensitivity per wavelength required");
  }
  for (std::size_t k = 0; k < wavelengths_nm.size(); ++k) {
    if (!(wavelengths_nm[k] > 0.0) || !(sensitivities[k] > 0.0)) {
      throw Error(ErrorCode::OutOfRange, "camera wavelengths and sensitivities must be positive");
    }
  }
}

CameraModel CameraModel::rgb_only() const {
  CameraModel out = *this;
  out.wavelengths_nm.resize(3);
  out.sensitivities.resize(3);
  return out;
}

CameraModel CameraModel::default_rgbn() {
  return CameraModel{{610.0, 540.0, 460.0, 850.0}, {1.0, 1.0, 1.0, 1.0}};
}

std::vector<double> render_pixel(const SurfaceSpec& surface, const IlluminantSpec& illuminant,
                                 const CameraModel& camera, double shading) {
  camera.validate();
  check_surface(surface, camera);
  if (!(shading > 0.0)) throw Error(ErrorCode::OutOfRange, "shading must be positive");
  std::vector<double> out(static_cast<std::size_t>(camera.channels()));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = shading *
             wien_spd(camera.wavelengths_nm[k], illuminant.temperature_k, illuminant.intensity) *
             surface.reflectance[k] * camera.sensitivities[k];
  }
  return out;
}

std::vector<double> LineModel::slope() const {
  double mean = 0.0;
  for (double x : e) mean += x;
  mean /= static_cast<double>(e.size());
  std::vector<double> out(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) out[k] = e[k] - mean;
  return out;
}

std::vector<double> LineModel::offset() const {
  std::vector<double> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = std::log(s[k] / s_m);
  return out;
}

std::vector<double> LineModel::chromaticity_at(double temperature_k) const {
  const auto a = slope();
  auto out = offset();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += a[k] / temperature_k;
  return out;
}

LineModel line_model(const SurfaceSpec& surface, const CameraModel& camera) {
  camera.validate();
  check_surface(surface, camera);
  LineModel m;
  m.lambda_m = geometric_mean(camera.wavelengths_nm);
  m.e_m = -kSecondRadiationConstant / m.lambda_m;
  for (int k = 0; k < camera.channels(); ++k) {
    const double lambda = camera.wavelengths_nm[k];
    m.e.push_back(-kSecondRadiationConstant / lambda);
    m.s.push_back(surface.reflectance[k] * camera.sensitivities[k] * std::pow(lambda, -5.0));
  }
  m.s_m = geometric_mean(m.s);
  return m;
}

std::vector<double> illumination_direction(const CameraModel& camera,
                                           const OrthonormalBasis& basis) {
  camera.validate();
  if (camera.channels() != basis.channels()) {
    throw Error(ErrorCode::DimensionMismatch, "camera and basis channel counts differ");
  }
  const auto [mn, mx] =
      std::minmax_element(camera.wavelengths_nm.begin(), camera.wavelengths_nm.end());
  if (*mn == *mx) throw Error(ErrorCode::DegenerateCamera, "all band centers coincide");

  std::vector<double> e(static_cast<std::size_t>(camera.channels()));
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = -kSecondRadiationConstant / camera.wavelengths_nm[k];
  std::vector<double> v(static_cast<std::size_t>(basis.dims()));
  basis.project(e, v);  // the basis annihilates the constant e_m term
  return normalized(std::move(v));
}

ProjectionDirection true_invariant_direction(const CameraModel& camera,
                                             const OrthonormalBasis& basis,
                                             std::span<const SurfaceSpec> surfaces) {
  const auto v = illumination_direction(camera, basis);
  if (basis.dims() == 2) {
    const double q[2] = {-v[1], v[0]};
    return ProjectionDirection::from_vector(q);
  }

  // Offsets of each surface's line, projected into the plane orthogonal to v.
  std::vector<Eigen::Vector3d> offsets;
  for (const auto& s : surfaces) {
    const auto lm = line_model(s, camera);
    const auto off = lm.offset();
    double red[3];
    basis.project(off, red);
    Eigen::Vector3d o(red[0], red[1], red[2]);
    const Eigen::Vector3d vv(v[0], v[1], v[2]);
    offsets.push_back(o - o.dot(vv) * vv);
  }

  if (offsets.size() >= 2) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& o : offsets) mean += o;
    mean /= static_cast<double>(offsets.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& o : offsets) cov += (o - mean) * (o - mean).transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (eig.eigenvalues()(2) > 1e-24) {
      const Eigen::Vector3d q = eig.eigenvectors().col(2);
      const double qa[3] = {q(0), q(1), q(2)};
      return ProjectionDirection::from_vector(qa);
    }
  }

  // Fallback: the coordinate axis least aligned with v, made orthogonal to it.
  std::size_t axis = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (std::abs(v[i]) < std::abs(v[axis])) axis = i;
  }
  double q[3] = {0.0, 0.0, 0.0};
  q[axis] = 1.0;
  const double d = dot(q, v);
  for (std::size_t i = 0; i < 3; ++i) q[i] -= d * v[i];
  return ProjectionDirection::from_vector(q);
}

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "scene size must be positive");
  if (patch_rows < 1 || patch_cols < 1 || patch_rows > height || patch_cols > width) {
    throw Error(ErrorCode::InvalidArgument, "patch grid does not fit the scene");
  }
  camera.validate();
  if (surfaces.empty()) throw Error(ErrorCode::InvalidArgument, "scene needs at least one surface");
  for (const auto& s : surfaces) check_surface(s, camera);
  if (illuminants.empty()) {
    throw Error(ErrorCode::InvalidArgument, "scene needs at least one illuminant");
  }
  for (const auto& il : illuminants) {
    check_temperature(il.temperature_k);
    if (!(il.intensity > 0.0)) throw Error(ErrorCode::OutOfRange, "illuminant intensity must be positive");
  }
  if (!patch_surfaces.empty()) {
    if (patch_surfaces.size() != static_cast<std::size_t>(patch_rows * patch_cols)) {
      throw Error(ErrorCode::DimensionMismatch, "patch_surfaces needs one entry per patch");
    }
    for (int s : patch_surfaces) {
      if (s < 0 || s >= static_cast<int>(surfaces.size())) {
        throw Error(ErrorCode::OutOfRange, "patch_surfaces index out of range");
      }
    }
  }
  if (!(shading_top > 0.0 && shading_bottom > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "shading must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::OutOfRange, "noise sigma must be >= 0");
  if (quantize_bits != 0 && quantize_bits != 8 && quantize_bits != 16) {
    throw Error(ErrorCode::InvalidArgument, "quantize_bits must be 0, 8 or 16");
  }
}

SceneSpec parse_scene_spec(std::string_view text) {
  const auto cfg = KeyValueConfig::parse(text);
  SceneSpec spec;
  spec.width = cfg.int_or("width", spec.width);
  spec.height = cfg.int_or("height", spec.height);
  spec.patch_rows = cfg.int_or("patch_rows", spec.patch_rows);
  spec.patch_cols = cfg.int_or("patch_cols", spec.patch_cols);

  if (const auto v = cfg.find("camera.wavelengths_nm")) spec.camera.wavelengths_nm = v->as_numbers();
  if (const auto v = cfg.find("camera.sensitivities")) {
    spec.camera.sensitivities = v->as_numbers();
  } else {
    spec.camera.sensitivities.assign(spec.camera.wavelengths_nm.size(), 1.0);
  }

  const auto& refl = cfg.at("surfaces.reflectances").as_array();
  for (std::size_t i = 0; i < refl.size(); ++i) {
    spec.surfaces.push_back(SurfaceSpec{static_cast<int>(i), refl[i].as_numbers()});
  }
  if (const auto v = cfg.find("surfaces.patch_surfaces")) {
    for (double s : v->as_numbers()) spec.patch_surfaces.push_back(static_cast<int>(s));
  }

  const auto temps = cfg.at("illumination.temperatures_k").as_numbers();
  std::vector<double> intensities(temps.size(), 1.0);
  if (const auto v = cfg.find("illumination.intensities")) intensities = v->as_numbers();
  if (intensities.size() != temps.size()) {
    throw Error(ErrorCode::ParseError, "illumination.intensities needs one value per temperature");
  }
  for (std::size_t i = 0; i < temps.size(); ++i) spec.illuminants.push_back({temps[i], intensities[i]});
  const std::string layout = cfg.string_or("illumination.layout", "patch_stripes");
  if (layout == "patch_stripes") {
    spec.layout = IlluminationLayout::PatchStripes;
  } else if (layout == "image_stripes") {
    spec.layout = IlluminationLayout::ImageStripes;
  } else {
    throw Error(ErrorCode::ParseError, "unknown illumination.layout '" + layout + "'");
  }

  spec.shading_top = cfg.number_or("shading.top", spec.shading_top);
  spec.shading_bottom = cfg.number_or("shading.bottom", spec.shading_bottom);
  spec.noise_sigma = cfg.number_or("noise.sigma", spec.noise_sigma);
  spec.seed = static_cast<std::uint64_t>(cfg.number_or("noise.seed", static_cast<double>(spec.seed)));
  spec.quantize_bits = cfg.int_or("noise.quantize_bits", spec.quantize_bits);
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene spec " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scene_spec(text);
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  SyntheticScene scene;
  scene.spec = spec;
  scene.image = MultiChannelImage(spec.width, spec.height, spec.camera.channels());
  scene.shading = ScalarField(spec.width, spec.height);
  const std::size_t n = scene.image.pixel_count();
  scene.surface_index.resize(n);
  scene.illuminant_index.resize(n);
  scene.patch_index.resize(n);

  const int n_illum = static_cast<int>(spec.illuminants.size());
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  const double levels =
      spec.quantize_bits == 0 ? 0.0 : std::ldexp(1.0, spec.quantize_bits) - 1.0;

  for (int y = 0; y < spec.height; ++y) {
    const int pr = y * spec.patch_rows / spec.height;
    const double t = spec.height > 1 ? static_cast<double>(y) / (spec.height - 1) : 0.0;
    const double shading = spec.shading_top + (spec.shading_bottom - spec.shading_top) * t;
    for (int x = 0; x < spec.width; ++x) {
      const int pc = x * spec.patch_cols / spec.width;
      const int patch = pr * spec.patch_cols + pc;
      const int surface = spec.patch_surfaces.empty()
                              ? patch % static_cast<int>(spec.surfaces.size())
                              : spec.patch_surfaces[static_cast<std::size_t>(patch)];
      int illum = 0;
      if (spec.layout == IlluminationLayout::PatchStripes) {
        const int x0 = pc * spec.width / spec.patch_cols;
        const int x1 = (pc + 1) * spec.width / spec.patch_cols;
        illum = (x - x0) * n_illum / (x1 - x0);
      } else {
        illum = x * n_illum / spec.width;
      }

      const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
      scene.surface_index[i] = surface;
      scene.illuminant_index[i] = illum;
      scene.patch_index[i] = patch;
      scene.shading[i] = shading;

      const auto px = render_pixel(spec.surfaces[static_cast<std::size_t>(surface)],
                                   spec.illuminants[static_cast<std::size_t>(illum)], spec.camera,
                                   shading);
      auto dst = scene.image.pixel(i);
      for (std::size_t k = 0; k < px.size(); ++k) {
        double v = px[k];
        if (spec.noise_sigma > 0.0) v = std::clamp(v + noise(rng), 0.0, 1.0);
        if (levels > 0.0) v = std::round(std::clamp(v, 0.0, 1.0) * levels) / levels;
        dst[k] = v;
      }
    }
  }

  for (const auto& s : spec.surfaces) scene.lines.push_back(line_model(s, spec.camera));
  scene.true_direction =
      true_invariant_direction(spec.camera, make_basis(spec.camera.channels()), spec.surfaces);
  std::vector<SurfaceSpec> rgb_surfaces;
  for (const auto& s : spec.surfaces) rgb_surfaces.push_back(rgb_part(s));
  scene.true_direction_rgb =
      true_invariant_direction(spec.camera.rgb_only(), make_basis(3), rgb_surfaces);
  return scene;
}

std::vector<RegionPair> derive_region_pairs(const SyntheticScene& scene, int margin) {
  const auto& spec = scene.spec;
  std::size_t dim = 0, bright = 0;
  for (std::size_t i = 1; i < spec.illuminants.size(); ++i) {
    if (spec.illuminants[i].intensity < spec.illuminants[dim].intensity) dim = i;
    if (spec.illuminants[i].intensity > spec.illuminants[bright].intensity) bright = i;
  }
  if (dim == bright) return {};

  struct Box {
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    void add(int x, int y) {
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
    bool valid() const { return x1 >= x0 && y1 >= y0; }
  };
  const int n_patches = spec.patch_rows * spec.patch_cols;
  std::vector<Box> shadow(static_cast<std::size_t>(n_patches)), lit(static_cast<std::size_t>(n_patches));
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
      const auto p = static_cast<std::size_t>(scene.patch_index[i]);
      const auto il = static_cast<std::size_t>(scene.illuminant_index[i]);
      if (il == dim) shadow[p].add(x, y);
      if (il == bright) lit[p].add(x, y);
    }
  }

  std::vector<RegionPair> pairs;
  for (int p = 0; p < n_patches; ++p) {
    const Box& s = shadow[static_cast<std::size_t>(p)];
    const Box& l = lit[static_cast<std::size_t>(p)];
    if (!s.valid() || !l.valid()) continue;
    const int y0 = std::max(s.y0, l.y0) + margin;
    const int y1 = std::min(s.y1, l.y1) - margin;
    const int w = std::min(s.x1 - s.x0, l.x1 - l.x0) + 1 - 2 * margin;
    const int h = y1 - y0 + 1;
    if (w < 1 || h < 1) continue;
    RegionPair pair;
    pair.label = "patch" + std::to_string(p / spec.patch_cols) + "_" + std::to_string(p % spec.patch_cols);
    pair.shadow = Rect{s.x0 + margin, y0, w, h};
    pair.lit = Rect{l.x0 + margin, y0, w, h};
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir,
                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto& img = scene.image;

  PixelBuffer rgb(img.width(), img.height(), 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) rgb.pixel(i)[c] = img.pixel(i)[c];
  }
  write_image(dir / (stem + "_rgb.tif"), rgb);
  if (img.has_nir()) {
    ScalarField nir(img.width(), img.height());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) nir[i] = img.pixel(i)[3];
    write_image(dir / (stem + "_nir.tif"), nir);
  }
  write_label_png(dir / (stem + "_surfaces.png"), img.width(), img.height(), scene.surface_index);
  write_label_png(dir / (stem + "_illuminants.png"), img.width(), img.height(),
                  scene.illuminant_index);

  {
    std::ofstream regions(dir / (stem + "_regions.txt"));
    regions << format_regions(derive_region_pairs(scene));
  }

  using nlohmann::json;
  auto direction_json = [](const ProjectionDirection& d) {
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
  };

  json truth;
  truth["width"] = img.width();
  truth["height"] = img.height();
  truth["camera"] = {{"wavelengths_nm", scene.spec.camera.wavelengths_nm},
                     {"sensitivities", scene.spec.camera.sensitivities}};
  truth["second_radiation_constant_nm_k"] = kSecondRadiationConstant;
  truth["wien_scale"] = wien_scale();
  json illum = json::array();
  for (const auto& il : scene.spec.illuminants) {
    illum.push_back({{"temperature_k", il.temperature_k}, {"intensity", il.intensity}});
  }
  truth["illuminants"] = illum;
  json surfaces = json::array();
  for (std::size_t s = 0; s < scene.spec.surfaces.size(); ++s) {
    const auto& lm = scene.lines[s];
    surfaces.push_back({{"id", scene.spec.surfaces[s].id},
                        {"reflectance", scene.spec.surfaces[s].reflectance},
                        {"e", lm.e},
                        {"e_m", lm.e_m},
                        {"lambda_m", lm.lambda_m},
                        {"s", lm.s},
                        {"s_m", lm.s_m},
                        {"slope", lm.slope()},
                        {"offset", lm.offset()}});
  }
  truth["surfaces"] = surfaces;
  truth["true_direction"] = direction_json(scene.true_direction);
  truth["true_direction_rgb"] = direction_json(scene.true_direction_rgb);
  truth["illumination_direction"] =
      illumination_direction(scene.spec.camera, make_basis(scene.spec.camera.channels()));

  std::ofstream out(dir / (stem + "_truth.json"));
  out << truth.dump(2) << '\n';
}

OracleCheck check_direction(const SyntheticScene& scene, const ProjectionDirection& found,
                            const ScalarField& raw) {
  if (raw.width() != scene.image.width() || raw.height() != scene.image.height()) {
    throw Error(ErrorCode::SizeMismatch, "invariant and scene sizes differ");
  }
  const bool full = found.dims() == scene.true_direction.dims();
  const CameraModel camera = full ? scene.spec.camera : scene.spec.camera.rgb_only();
  const auto& truth = full ? scene.true_direction : scene.true_direction_rgb;
  if (found.dims() != truth.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "direction does not match the scene camera");
  }

  OracleCheck check;
  check.dims = found.dims();
  check.angle_error_deg = angular_distance_deg(found, truth);
  const auto v = illumination_direction(camera, make_basis(camera.channels()));
  const double along = std::min(1.0, std::abs(dot(v, found.vector())));
  check.invariant_deviation_deg = std::asin(along) * 180.0 / std::numbers::pi;

  const std::size_t n_surf = scene.spec.surfaces.size();
  std::vector<double> lo(n_surf, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n_surf, -std::numeric_limits<double>::infinity());
  std::vector<double> sum(n_surf, 0.0);
  std::vector<std::size_t> count(n_surf, 0);
  for (std::size_t i = 0; i < raw.pixel_count(); ++i) {
    const auto s = static_cast<std::size_t>(scene.surface_index[i]);
    lo[s] = std::min(lo[s], raw[i]);
    hi[s] = std::max(hi[s], raw[i]);
    sum[s] += raw[i];
    ++count[s];
  }
  for (std::size_t s = 0; s < n_surf; ++s) {
    if (count[s] == 0) continue;
    const double mean = sum[s] / static_cast<double>(count[s]);
    check.max_relative_spread = std::max(check.max_relative_spread, (hi[s] - lo[s]) / mean);
  }
  return check;
}

}  // namespace rgbn
