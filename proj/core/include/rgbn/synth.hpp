#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgbn/chromaticity.hpp"
#include "rgbn/entropy.hpp"
#include "rgbn/eval.hpp"
#include "rgbn/image.hpp"

namespace rgbn {

/// Second radiation constant hc/k in nm*K.
inline constexpr double kSecondRadiationConstant = 1.4388e7;

/// Scale factor in front of Wien's law, chosen so that the spectral peak at
/// 6500 K with unit intensity equals 0.8.
double wien_scale();

/// I * a1 * lambda^-5 * exp(-a2 / (lambda T)), lambda in nm.
/// Throws OutOfRange for T outside [2500, 10000] K or non-positive lambda/I.
double wien_spd(double wavelength_nm, double temperature_k, double intensity = 1.0);

/// Narrow-band camera: one delta-function sensitivity per channel.
struct CameraModel {
  std::vector<double> wavelengths_nm;
  std::vector<double> sensitivities;

  int channels() const noexcept { return static_cast<int>(wavelengths_nm.size()); }
  void validate() const;
  /// First three channels only.
  CameraModel rgb_only() const;

  /// R, G, B, NIR band centers at 610, 540, 460, 850 nm with unit sensitivity.
  static CameraModel default_rgbn();
};

struct SurfaceSpec {
  int id = 0;
  std::vector<double> reflectance;  ///< S(lambda_k), in (0, 1]
};

struct IlluminantSpec {
  double temperature_k = 6500.0;
  double intensity = 1.0;
};

/// R_k = shading * I * a1 * lambda_k^-5 * exp(-a2 / (lambda_k T)) * S_k * q_k
std::vector<double> render_pixel(const SurfaceSpec& surface, const IlluminantSpec& illuminant,
                                 const CameraModel& camera, double shading);

/// Line traced by one surface's log-chromaticity as temperature varies:
/// phi_k(T) = slope_k / T + offset_k.
struct LineModel {
  std::vector<double> e;  ///< -a2 / lambda_k
  double lambda_m = 0.0;  ///< geometric mean wavelength
  double e_m = 0.0;       ///< -a2 / lambda_m
  std::vector<double> s;  ///< S_k q_k lambda_k^-5
  double s_m = 0.0;       ///< geometric mean of s

  /// e_k - mean(e): exact zero-sum slope of the chromaticity line.
  std::vector<double> slope() const;
  /// log(s_k / s_m)
  std::vector<double> offset() const;
  std::vector<double> chromaticity_at(double temperature_k) const;
};

LineModel line_model(const SurfaceSpec& surface, const CameraModel& camera);

/// Unit vector (in reduced coordinates) along which chromaticities move as
/// the temperature changes.
std::vector<double> illumination_direction(const CameraModel& camera,
                                           const OrthonormalBasis& basis);

/// A reduced-space direction orthogonal to the illumination direction. In 2D
/// it is unique up to sign. In 3D the orthogonal complement is a plane, and
/// the in-plane vector maximizing the variance of the surfaces' projected
/// offsets is returned (a fixed in-plane axis when no surfaces are given).
/// Throws DegenerateCamera if all wavelengths coincide.
ProjectionDirection true_invariant_direction(const CameraModel& camera,
                                             const OrthonormalBasis& basis,
                                             std::span<const SurfaceSpec> surfaces = {});

enum class IlluminationLayout {
  PatchStripes,  ///< every patch is split into vertical stripes, one per illuminant
  ImageStripes,  ///< the whole image is split into vertical stripes
};

/// Scene layout: a grid of surface patches lit by several Planckian
/// illuminants, with a vertical shading gradient and optional noise.
struct SceneSpec {
  int width = 128;
  int height = 128;
  int patch_rows = 2;
  int patch_cols = 2;
  CameraModel camera = CameraModel::default_rgbn();
  std::vector<SurfaceSpec> surfaces;
  /// Row-major surface index per patch; empty cycles through the surfaces.
  std::vector<int> patch_surfaces;
  std::vector<IlluminantSpec> illuminants;
  IlluminationLayout layout = IlluminationLayout::PatchStripes;
  double shading_top = 1.0;
  double shading_bottom = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  int quantize_bits = 0;  ///< 0 keeps doubles; 8 or 16 quantizes

  void validate() const;
};

SceneSpec parse_scene_spec(std::string_view text);
SceneSpec load_scene_spec(const std::filesystem::path& path);

struct SyntheticScene {
  SceneSpec spec;
  MultiChannelImage image;
  std::vector<int> surface_index;     ///< into spec.surfaces, per pixel
  std::vector<int> illuminant_index;  ///< into spec.illuminants, per pixel
  std::vector<int> patch_index;
  ScalarField shading;
  std::vector<LineModel> lines;  ///< one per surface
  ProjectionDirection true_direction;      ///< full camera
  ProjectionDirection true_direction_rgb;  ///< RGB channels only
};

SyntheticScene generate_scene(const SceneSpec& spec);

/// For every patch, a same-size pair of rectangles: one under the dimmest
/// illuminant, one under the brightest, inset from the stripe boundaries.
std::vector<RegionPair> derive_region_pairs(const SyntheticScene& scene, int margin = 2);

/// How well a found direction matches the scene's ground truth.
struct OracleCheck {
  int dims = 0;
  /// Angle to the reference true direction (mod sign), degrees.
  double angle_error_deg = 0.0;
  /// Angle between the direction and the plane (line, for dims 2) of
  /// illumination-invariant directions, degrees. Zero means exactly invariant.
  double invariant_deviation_deg = 0.0;
  /// Largest per-surface (max - min) / mean of the raw invariant.
  double max_relative_spread = 0.0;
};

/// `raw` is exp(reduced . found) for the scene's full image (dims 3) or its
/// RGB channels (dims 2).
OracleCheck check_direction(const SyntheticScene& scene, const ProjectionDirection& found,
                            const ScalarField& raw);

/// Writes `<stem>_rgb.tif`, `<stem>_nir.tif` (16-bit), `<stem>_surfaces.png`
/// and `<stem>_illuminants.png` (raw indices), `<stem>_regions.txt` and the
/// `<stem>_truth.json` sidecar with the true directions and line models.
void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir,
                 const std::string& stem);

}  // namespace rgbn
