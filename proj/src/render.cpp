#include "ipt/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "ipt/errors.hpp"
#include "ipt/random.hpp"

namespace ipt {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::uint8_t lit(std::uint8_t c, double light) {
  const double v = std::floor(static_cast<double>(c) * light + 0.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

Rgb lit(Rgb c, double light) { return {lit(c.r, light), lit(c.g, light), lit(c.b, light)}; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

struct Projected {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool visible = false;
};

class Canvas {
 public:
  Canvas(std::uint32_t width, std::uint32_t height)
      : width_(width), height_(height), colors_(std::size_t{width} * height), painted_(std::size_t{width} * height, 0) {}

  // Paints every pixel centre within `radius` of the segment a-b.
  void capsule(double ax, double ay, double bx, double by, double radius, Rgb color) {
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - radius)));
    const int x1 = std::min(static_cast<int>(width_) - 1, static_cast<int>(std::ceil(std::max(ax, bx) + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - radius)));
    const int y1 = std::min(static_cast<int>(height_) - 1, static_cast<int>(std::ceil(std::max(ay, by) + radius)));
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double t = len2 > 0.0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double px = ax + t * dx - x;
        const double py = ay + t * dy - y;
        if (px * px + py * py <= r2) {
          const std::size_t i = static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
          colors_[i] = color;
          painted_[i] = 1;
        }
      }
    }
  }

  void disc(double cx, double cy, double radius, Rgb color) { capsule(cx, cy, cx, cy, radius, color); }

  // Composites over the background. A figure pixel that happens to match the
  // background colour is nudged so the mask stays exactly "differs from
  // background".
  std::pair<Frame, Mask> compose(const Frame& background) const {
    std::vector<std::uint8_t> pixels(background.pixels().begin(), background.pixels().end());
    for (std::size_t i = 0; i < painted_.size(); ++i) {
      if (!painted_[i]) continue;
      Rgb c = colors_[i];
      if (c.r == pixels[3 * i] && c.g == pixels[3 * i + 1] && c.b == pixels[3 * i + 2]) c.r ^= 1;
      pixels[3 * i] = c.r;
      pixels[3 * i + 1] = c.g;
      pixels[3 * i + 2] = c.b;
    }
    return {Frame(width_, height_, std::move(pixels)), Mask(width_, height_, painted_)};
  }

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<Rgb> colors_;
  std::vector<std::uint8_t> painted_;
};

}  // namespace

CameraPose camera_from_factors(const FactorVector& factors, const Eigen::Vector3d& target) {
  if (!(factors.distance > 0.0)) throw ConfigError("camera distance must be > 0");
  if (std::abs(factors.elevation_deg) == 90.0) {
    throw ConfigError("elevation of exactly +/-90 degrees leaves the camera up vector undefined");
  }
  const double az = factors.azimuth_deg * kDegToRad;
  const double el = factors.elevation_deg * kDegToRad;
  const Eigen::Vector3d dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
  return {target + factors.distance * dir, target, Eigen::Vector3d::UnitZ()};
}

const AppearanceCatalog& builtin_appearances() {
  static const AppearanceCatalog catalog = [] {
    const std::vector<AppearanceProfile> profiles = {
        {"a0", {220, 60, 40}, 1.2, {250, 220, 60}},   {"a1", {40, 90, 220}, 1.2, {240, 240, 240}},
        {"a2", {30, 160, 70}, 1.0, {20, 20, 20}},     {"a3", {240, 240, 240}, 1.4, {200, 30, 30}},
        {"a4", {20, 20, 20}, 1.4, {90, 200, 230}},    {"a5", {160, 60, 190}, 0.9, {250, 160, 40}},
        {"a6", {250, 150, 20}, 1.6, {60, 40, 30}},    {"a7", {110, 75, 45}, 1.1, {255, 255, 255}},
    };
    AppearanceCatalog c;
    for (const auto& p : profiles) c.emplace(p.appearance_id, p);
    return c;
  }();
  return catalog;
}

const std::vector<std::string>& builtin_backgrounds() {
  static const std::vector<std::string> ids = {"flat_gray", "flat_green", "flat_blue", "flat_white",
                                               "checker",   "gradient",   "speckle"};
  return ids;
}

void SceneSpec::validate() const {
  if (!clip) throw ConfigError("scene has no motion clip");
  if (!(focal_length > 0.0) || !std::isfinite(focal_length)) throw ConfigError("focal_length must be > 0");
  if (width < 32 || height < 32) throw ConfigError("image size must be at least 32x32");
}

std::vector<std::vector<Eigen::Vector3d>> figure_track(const MotionClip& clip) {
  // Y-up source -> Z-up world: (x, y, z) -> (x, -z, y).
  std::vector<std::vector<Eigen::Vector3d>> track;
  track.reserve(clip.frame_count());
  for (std::size_t f = 0; f < clip.frame_count(); ++f) {
    auto pose = forward_kinematics(clip, f);
    for (auto& p : pose.joint_positions) p = Eigen::Vector3d(p.x(), -p.z(), p.y());
    track.push_back(std::move(pose.joint_positions));
  }
  return track;
}

Eigen::Vector3d figure_center(const std::vector<std::vector<Eigen::Vector3d>>& track) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto& frame : track) {
    for (const auto& p : frame) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  return 0.5 * (lo + hi);
}

double auto_focal_length(const MotionClip& clip, std::uint32_t image_height, double distance, double fraction) {
  // Largest box dimension of any single frame, so root travel does not shrink the figure.
  double extent = 0.0;
  for (const auto& frame : figure_track(clip)) {
    Eigen::Vector3d lo = frame.front();
    Eigen::Vector3d hi = lo;
    for (const auto& p : frame) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    extent = std::max(extent, (hi - lo).maxCoeff());
  }
  if (!(extent > 0.0)) throw DataError("figure has zero extent; cannot derive a focal length");
  return fraction * static_cast<double>(image_height) * distance / extent;
}

Frame background_frame(const std::string& background_id, std::uint32_t width, std::uint32_t height,
                       double light_intensity, std::uint64_t seed) {
  std::vector<std::uint8_t> pixels(std::size_t{width} * height * 3);
  auto put = [&](std::uint32_t x, std::uint32_t y, Rgb c) {
    const std::size_t i = (std::size_t{y} * width + x) * 3;
    const Rgb l = lit(c, light_intensity);
    pixels[i] = l.r;
    pixels[i + 1] = l.g;
    pixels[i + 2] = l.b;
  };
  auto flat = [&](Rgb c) {
    for (std::uint32_t y = 0; y < height; ++y)
      for (std::uint32_t x = 0; x < width; ++x) put(x, y, c);
  };

  if (background_id == "flat_gray") {
    flat({128, 128, 128});
  } else if (background_id == "flat_green") {
    flat({60, 140, 60});
  } else if (background_id == "flat_blue") {
    flat({40, 70, 160});
  } else if (background_id == "flat_white") {
    flat({235, 235, 235});
  } else if (background_id == "checker") {
    for (std::uint32_t y = 0; y < height; ++y)
      for (std::uint32_t x = 0; x < width; ++x)
        put(x, y, ((x / 8 + y / 8) % 2 == 0) ? Rgb{200, 200, 200} : Rgb{90, 90, 90});
  } else if (background_id == "gradient") {
    for (std::uint32_t y = 0; y < height; ++y) {
      const double t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
      auto mix = [t](int a, int b) { return static_cast<std::uint8_t>(std::lround(a + (b - a) * t)); };
      const Rgb c{mix(70, 200), mix(110, 190), mix(180, 150)};
      for (std::uint32_t x = 0; x < width; ++x) put(x, y, c);
    }
  } else if (background_id == "speckle") {
    std::mt19937_64 rng(derive_seed(seed, "speckle"));
    const std::uint32_t bw = (width + 3) / 4;
    const std::uint32_t bh = (height + 3) / 4;
    std::vector<std::uint8_t> levels(std::size_t{bw} * bh);
    for (auto& l : levels) l = static_cast<std::uint8_t>(60 + uniform_index(rng, 140));
    for (std::uint32_t y = 0; y < height; ++y)
      for (std::uint32_t x = 0; x < width; ++x) {
        const auto l = levels[std::size_t{y / 4} * bw + x / 4];
        put(x, y, {l, l, l});
      }
  } else if (background_id.size() == 12 && background_id.starts_with("flat:#")) {
    int v[6];
    for (int k = 0; k < 6; ++k) {
      v[k] = hex_digit(background_id[6 + k]);
      if (v[k] < 0) throw ConfigError("bad colour in background id '" + background_id + "'");
    }
    flat({static_cast<std::uint8_t>(v[0] * 16 + v[1]), static_cast<std::uint8_t>(v[2] * 16 + v[3]),
          static_cast<std::uint8_t>(v[4] * 16 + v[5])});
  } else {
    throw ConfigError("unknown background_id '" + background_id + "'");
  }
  return Frame(width, height, std::move(pixels));
}

RenderOutput render(const SceneSpec& spec, const std::string& video_id, int class_label, double fps,
                    const AppearanceCatalog& catalog) {
  spec.validate();
  const FactorVector factors = spec.factors.normalized();
  const auto app_it = catalog.find(factors.appearance_id);
  if (app_it == catalog.end()) throw ConfigError("unknown appearance_id '" + factors.appearance_id + "'");
  const AppearanceProfile& appearance = app_it->second;
  if (!(appearance.limb_radius > 0.0)) throw ConfigError("appearance '" + appearance.appearance_id + "' radius <= 0");

  const auto track = figure_track(*spec.clip);
  const CameraPose camera = camera_from_factors(factors, figure_center(track));
  const Eigen::Vector3d forward = (camera.target - camera.position).normalized();
  const Eigen::Vector3d right = forward.cross(camera.up).normalized();
  const Eigen::Vector3d up = right.cross(forward);
  const double cx = (static_cast<double>(spec.width) - 1.0) / 2.0;
  const double cy = (static_cast<double>(spec.height) - 1.0) / 2.0;
  const double near = 1e-6 * factors.distance;

  const Frame background =
      background_frame(factors.background_id, spec.width, spec.height, factors.light_intensity, spec.seed);
  const Rgb limb_color = lit(appearance.limb_color, factors.light_intensity);
  const Rgb joint_color = lit(appearance.joint_color, factors.light_intensity);
  const auto& joints = spec.clip->skeleton().joints();

  std::vector<Frame> frames;
  std::vector<Mask> masks;
  std::vector<std::size_t> empty_frames;
  frames.reserve(track.size());
  masks.reserve(track.size());

  for (std::size_t f = 0; f < track.size(); ++f) {
    std::vector<Projected> proj(joints.size());
    bool any_visible = false;
    for (std::size_t j = 0; j < joints.size(); ++j) {
      const Eigen::Vector3d rel = track[f][j] - camera.position;
      const double depth = rel.dot(forward);
      if (depth <= near) continue;
      proj[j] = {cx + spec.focal_length * rel.dot(right) / depth, cy - spec.focal_length * rel.dot(up) / depth, depth,
                 true};
      any_visible = true;
    }
    if (!any_visible) {
      empty_frames.push_back(f);
      continue;
    }
    auto radius_at = [&](double depth) { return std::max(0.5, appearance.limb_radius * spec.focal_length / depth); };

    Canvas canvas(spec.width, spec.height);
    if (spec.style == RenderStyle::stick_figure) {
      for (std::size_t j = 0; j < joints.size(); ++j) {
        if (!joints[j].parent) continue;
        const auto& a = proj[*joints[j].parent];
        const auto& b = proj[j];
        if (!a.visible || !b.visible) continue;
        canvas.capsule(a.u, a.v, b.u, b.v, radius_at(0.5 * (a.depth + b.depth)), limb_color);
      }
      for (std::size_t j = 0; j < joints.size(); ++j) {
        if (joints[j].end_site || !proj[j].visible) continue;
        canvas.disc(proj[j].u, proj[j].v, 1.25 * radius_at(proj[j].depth), joint_color);
      }
    } else {
      for (std::size_t j = 0; j < joints.size(); ++j) {
        if (!proj[j].visible) continue;
        canvas.disc(proj[j].u, proj[j].v, std::max(1.0, 1.5 * radius_at(proj[j].depth)), joint_color);
      }
    }
    auto [frame, mask] = canvas.compose(background);
    frames.push_back(std::move(frame));
    masks.push_back(std::move(mask));
  }

  if (!empty_frames.empty()) {
    std::string list;
    for (auto f : empty_frames) list += (list.empty() ? "" : ",") + std::to_string(f);
    throw DataError("subject entirely behind the camera in frames [" + list + "]");
  }
  return {Video(video_id, class_label, fps, std::move(frames)), MaskSequence(std::move(masks))};
}

const char* factor_name(SweepFactor f) {
  switch (f) {
    case SweepFactor::azimuth:
      return "azimuth";
    case SweepFactor::elevation:
      return "elevation";
    case SweepFactor::distance:
      return "distance";
  }
  return "?";
}

SweepFactor parse_factor(const std::string& name) {
  if (name == "azimuth") return SweepFactor::azimuth;
  if (name == "elevation") return SweepFactor::elevation;
  if (name == "distance") return SweepFactor::distance;
  throw ConfigError("unknown sweep factor '" + name + "'");
}

std::vector<SceneSpec> enumerate_sweep(const FactorSweep& sweep) {
  if (sweep.count < 1) throw ConfigError("sweep count must be >= 1");
  if (sweep.delta == 0.0) throw ConfigError("sweep delta must be non-zero");
  std::vector<SceneSpec> specs;
  specs.reserve(sweep.count);
  for (std::size_t i = 0; i < sweep.count; ++i) {
    SceneSpec spec = sweep.base;
    const double value = sweep.x1 + static_cast<double>(i) * sweep.delta;
    switch (sweep.factor) {
      case SweepFactor::azimuth:
        spec.factors.azimuth_deg = value;
        break;
      case SweepFactor::elevation:
        spec.factors.elevation_deg = value;
        break;
      case SweepFactor::distance:
        spec.factors.distance = value;
        break;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

FactorSweep standard_sweep(SweepFactor factor, SceneSpec base) {
  FactorSweep s;
  s.factor = factor;
  s.count = 360;
  s.base = std::move(base);
  switch (factor) {
    case SweepFactor::azimuth:
      s.x1 = 0.0;
      s.delta = 1.0;
      break;
    case SweepFactor::elevation:
      s.x1 = -30.0;
      s.delta = 0.25;
      break;
    case SweepFactor::distance:
      s.x1 = 100.0;
      s.delta = 1.0;
      break;
  }
  return s;
}

SceneSpec randomize_nuisance(const SceneSpec& spec, std::uint64_t seed, const NuisancePools& pools) {
  if (pools.backgrounds.empty()) throw ConfigError("background pool is empty");
  if (pools.appearances.empty()) throw ConfigError("appearance pool is empty");
  if (pools.light_intensities.empty()) throw ConfigError("light intensity pool is empty");
  std::mt19937_64 rng(seed);
  SceneSpec out = spec;
  out.factors.background_id = pools.backgrounds[uniform_index(rng, pools.backgrounds.size())];
  out.factors.appearance_id = pools.appearances[uniform_index(rng, pools.appearances.size())];
  out.factors.light_intensity = pools.light_intensities[uniform_index(rng, pools.light_intensities.size())];
  return out;
}

}  // namespace ipt
