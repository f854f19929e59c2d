#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ipt/bvh.hpp"
#include "ipt/types.hpp"

namespace ipt {

/// Camera placement in the Z-up world frame. Roll is always zero.
struct CameraPose {
  Eigen::Vector3d position;
  Eigen::Vector3d target;
  Eigen::Vector3d up;
};

/// position = target + distance * (cos el cos az, cos el sin az, sin el).
/// Throws ConfigError for distance <= 0 or |elevation| == 90.
CameraPose camera_from_factors(const FactorVector& factors, const Eigen::Vector3d& target);

struct AppearanceProfile {
  std::string appearance_id;
  Rgb limb_color;
  double limb_radius = 1.5;  // scene units; projected radius is radius * focal / depth
  Rgb joint_color;
};

/// appearance_id -> profile. The built-in catalog holds eight profiles a0..a7.
using AppearanceCatalog = std::map<std::string, AppearanceProfile>;
const AppearanceCatalog& builtin_appearances();

/// Procedural background ids: flat_gray, flat_green, flat_blue, flat_white,
/// checker, gradient, speckle (seeded).
const std::vector<std::string>& builtin_backgrounds();

enum class RenderStyle { stick_figure, point_light };

struct SceneSpec {
  std::shared_ptr<const MotionClip> clip;
  FactorVector factors;
  std::uint32_t width = 64;
  std::uint32_t height = 64;
  double focal_length = 100.0;
  std::uint64_t seed = 0;
  RenderStyle style = RenderStyle::stick_figure;

  /// Throws ConfigError on a missing clip, focal_length <= 0 or a frame
  /// smaller than 32x32.
  void validate() const;
};

/// Per-frame world positions of every joint in the renderer's Z-up frame.
/// BVH data is Y-up and is turned by +90 degrees about X. Depends on the clip
/// only, never on the factors.
std::vector<std::vector<Eigen::Vector3d>> figure_track(const MotionClip& clip);

/// Centre of the axis-aligned box around the whole track; the camera aims here.
Eigen::Vector3d figure_center(const std::vector<std::vector<Eigen::Vector3d>>& track);

/// Focal length (pixels) at which the largest per-frame extent of the figure
/// spans `fraction` of the frame height from `distance`.
double auto_focal_length(const MotionClip& clip, std::uint32_t image_height, double distance, double fraction = 1.0 / 3.0);

/// The frame the figure is drawn over, lighting included.
Frame background_frame(const std::string& background_id, std::uint32_t width, std::uint32_t height,
                       double light_intensity, std::uint64_t seed);

struct RenderOutput {
  Video video;
  MaskSequence masks;
};

/// Deterministic render of `spec`. Throws DataError listing the frames where
/// every joint sits behind the camera.
RenderOutput render(const SceneSpec& spec, const std::string& video_id = "render", int class_label = 0, double fps = 30.0,
                    const AppearanceCatalog& catalog = builtin_appearances());

enum class SweepFactor { azimuth, elevation, distance };

const char* factor_name(SweepFactor f);
SweepFactor parse_factor(const std::string& name);

struct FactorSweep {
  SweepFactor factor = SweepFactor::azimuth;
  double x1 = 0.0;
  double delta = 1.0;
  std::size_t count = 360;
  SceneSpec base;
};

/// Spec i sets the swept factor to x1 + i * delta; everything else comes from
/// the base spec.
std::vector<SceneSpec> enumerate_sweep(const FactorSweep& sweep);

/// The three controlled splits: azimuth 0+1i, elevation -30+0.25i and
/// distance 100+1i for i in [0, 360).
FactorSweep standard_sweep(SweepFactor factor, SceneSpec base);

struct NuisancePools {
  std::vector<std::string> backgrounds;
  std::vector<std::string> appearances;
  std::vector<double> light_intensities;
};

/// Resamples background, appearance and light from the pools. The clip is
/// untouched. Throws ConfigError on an empty pool.
SceneSpec randomize_nuisance(const SceneSpec& spec, std::uint64_t seed, const NuisancePools& pools);

}  // namespace ipt
