#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipt/analysis.hpp"
#include "ipt/image_transforms.hpp"
#include "ipt/metrics.hpp"
#include "ipt/render.hpp"

namespace ipt {

struct ClipConfig {
  std::string path;  // resolved against the config file's directory
  std::string label;
  std::string name;  // defaults to the file stem
  std::size_t first_frame = 0;
  std::optional<std::size_t> max_frames;
};

struct SweepConfig {
  SweepFactor factor = SweepFactor::azimuth;
  double x1 = 0.0;
  double delta = 1.0;
  std::size_t count = 360;
};

struct RenderConfig {
  std::uint32_t width = 64;
  std::uint32_t height = 64;
  double fps = 30.0;
  std::optional<double> focal_length;  // unset: derived per clip
  double figure_fraction = 1.0 / 3.0;
  double reference_distance = 100.0;
  RenderStyle style = RenderStyle::stick_figure;
  std::vector<ClipConfig> clips;
  std::vector<std::string> appearances{"a0"};
  AppearanceCatalog catalog = builtin_appearances();
  FactorVector base;
  std::optional<NuisancePools> randomize;
};

struct EvaluateConfig {
  std::string model;
  std::vector<std::string> features;
  std::size_t jobs = 1;
  double timeout_s = 120.0;
};

struct ReportConfig {
  std::size_t smoothing_window = kDefaultSmoothingWindow;
  RegimeThresholds thresholds;
  double drop_threshold = 0.2;
  std::size_t pca_dims = 3;
};

/// One JSON document with sections render, sweeps, transforms, evaluate and
/// report; every section is optional.
struct Config {
  RenderConfig render;
  std::vector<SweepConfig> sweeps;
  std::vector<ImageTransformSpec> transforms;
  EvaluateConfig evaluate;
  ReportConfig report;
};

/// Validates and converts. Errors are ConfigError messages prefixed with the
/// JSON pointer of the offending value, e.g. "/render/clips/0/path: ...".
Config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

}  // namespace ipt
