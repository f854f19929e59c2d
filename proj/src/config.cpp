#include "ipt/config.hpp"

#include <fstream>
#include <set>

#include <cmath>

#include "ipt/dataset.hpp"
#include "ipt/errors.hpp"
#include "ipt/protocol.hpp"

namespace ipt {
namespace {

using nlohmann::json;

// Typed accessors that report failures by JSON pointer.
class Node {
 public:
  Node(const json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError((pointer_.empty() ? "/" : pointer_) + ": " + why);
  }

  const json& value() const { return value_; }
  const std::string& pointer() const { return pointer_; }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : value_.items()) {
      if (!keys.contains(k)) Node(v, pointer_ + "/" + k).fail("unknown key");
    }
  }

  bool has(const char* key) const { return value_.contains(key) && !value_.at(key).is_null(); }
  Node at(const char* key) const { return {value_.at(key), pointer_ + "/" + key}; }
  Node at(std::size_t i) const { return {value_.at(i), pointer_ + "/" + std::to_string(i)}; }

  const json& array() const {
    if (!value_.is_array()) fail("expected an array");
    return value_;
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }

  double number(double lo, double hi) const {
    const double v = number();
    if (v < lo || v > hi) fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::size_t count(std::size_t lo, std::size_t hi = SIZE_MAX) const {
    if (!value_.is_number_integer() || value_.get<std::int64_t>() < 0) fail("expected a non-negative integer");
    const auto v = value_.get<std::size_t>();
    if (v < lo || v > hi) fail("integer " + std::to_string(v) + " out of range");
    return v;
  }

  std::vector<std::string> strings(bool non_empty) const {
    std::vector<std::string> out;
    const auto& a = array();
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(at(i).string());
    if (non_empty && out.empty()) fail("must not be empty");
    return out;
  }

  Rgb color() const {
    const auto& a = array();
    if (a.size() != 3) fail("expected [r, g, b]");
    Rgb c;
    c.r = static_cast<std::uint8_t>(at(std::size_t{0}).count(0, 255));
    c.g = static_cast<std::uint8_t>(at(std::size_t{1}).count(0, 255));
    c.b = static_cast<std::uint8_t>(at(std::size_t{2}).count(0, 255));
    return c;
  }

 private:
  const json& value_;
  std::string pointer_;
};

template <typename F>
auto convert(const Node& node, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    node.fail(e.what());
  }
}

RenderConfig parse_render(const Node& n, const std::filesystem::path& base_dir) {
  n.require_object({"width", "height", "fps", "focal_length", "figure_fraction", "reference_distance", "style", "clips",
                    "appearances", "custom_appearances", "factors", "randomize"});
  RenderConfig r;
  if (n.has("width")) r.width = static_cast<std::uint32_t>(n.at("width").count(32, 8192));
  if (n.has("height")) r.height = static_cast<std::uint32_t>(n.at("height").count(32, 8192));
  if (n.has("fps")) r.fps = n.at("fps").number(1e-6, 1e6);
  if (n.has("focal_length")) {
    r.focal_length = n.at("focal_length").number();
    if (!(*r.focal_length > 0.0)) n.at("focal_length").fail("must be > 0");
  }
  if (n.has("figure_fraction")) r.figure_fraction = n.at("figure_fraction").number(1e-3, 10.0);
  if (n.has("reference_distance")) r.reference_distance = n.at("reference_distance").number(1e-9, 1e12);
  if (n.has("style")) {
    const auto s = n.at("style").string();
    if (s == "stick_figure") {
      r.style = RenderStyle::stick_figure;
    } else if (s == "point_light") {
      r.style = RenderStyle::point_light;
    } else {
      n.at("style").fail("expected 'stick_figure' or 'point_light'");
    }
  }
  if (n.has("custom_appearances")) {
    const auto list = n.at("custom_appearances");
    for (std::size_t i = 0; i < list.array().size(); ++i) {
      const auto a = list.at(i);
      a.require_object({"appearance_id", "limb_color", "limb_radius", "joint_color"});
      for (const char* key : {"appearance_id", "limb_color", "limb_radius", "joint_color"}) {
        if (!a.has(key)) a.fail(std::string("missing key '") + key + "'");
      }
      AppearanceProfile p{a.at("appearance_id").string(), a.at("limb_color").color(), a.at("limb_radius").number(),
                          a.at("joint_color").color()};
      if (!(p.limb_radius > 0.0)) a.at("limb_radius").fail("must be > 0");
      r.catalog[p.appearance_id] = p;
    }
  }
  if (n.has("appearances")) {
    const auto list = n.at("appearances");
    r.appearances = list.strings(true);
    for (std::size_t i = 0; i < r.appearances.size(); ++i) {
      if (!r.catalog.contains(r.appearances[i])) list.at(i).fail("unknown appearance '" + r.appearances[i] + "'");
    }
  }
  if (n.has("factors")) {
    const auto f = n.at("factors");
    f.require_object({"azimuth_deg", "elevation_deg", "distance", "appearance_id", "background_id", "light_intensity"});
    if (f.has("azimuth_deg")) r.base.azimuth_deg = f.at("azimuth_deg").number();
    if (f.has("elevation_deg")) {
      r.base.elevation_deg = f.at("elevation_deg").number(-90.0, 90.0);
      if (std::abs(r.base.elevation_deg) == 90.0) f.at("elevation_deg").fail("must not be exactly +/-90");
    }
    if (f.has("distance")) {
      r.base.distance = f.at("distance").number();
      if (!(r.base.distance > 0.0)) f.at("distance").fail("must be > 0");
    }
    if (f.has("appearance_id")) r.base.appearance_id = f.at("appearance_id").string();
    if (f.has("background_id")) {
      r.base.background_id = f.at("background_id").string();
      convert(f.at("background_id"), [&] { return background_frame(r.base.background_id, 1, 1, 1.0, 0); });
    }
    if (f.has("light_intensity")) r.base.light_intensity = f.at("light_intensity").number(0.0, 1e3);
  }
  if (n.has("randomize")) {
    const auto p = n.at("randomize");
    p.require_object({"backgrounds", "appearances", "light_intensities"});
    NuisancePools pools;
    pools.backgrounds = p.has("backgrounds") ? p.at("backgrounds").strings(true) : std::vector{r.base.background_id};
    pools.appearances = p.has("appearances") ? p.at("appearances").strings(true) : r.appearances;
    if (p.has("light_intensities")) {
      const auto l = p.at("light_intensities");
      for (std::size_t i = 0; i < l.array().size(); ++i) pools.light_intensities.push_back(l.at(i).number(0.0, 1e3));
      if (pools.light_intensities.empty()) l.fail("must not be empty");
    } else {
      pools.light_intensities = {r.base.light_intensity};
    }
    for (std::size_t i = 0; i < pools.backgrounds.size(); ++i) {
      convert(p.at("backgrounds").at(i), [&] { return background_frame(pools.backgrounds[i], 1, 1, 1.0, 0); });
    }
    for (std::size_t i = 0; i < pools.appearances.size(); ++i) {
      if (!r.catalog.contains(pools.appearances[i])) {
        p.at("appearances").at(i).fail("unknown appearance '" + pools.appearances[i] + "'");
      }
    }
    r.randomize = std::move(pools);
  }
  if (!n.has("clips")) n.fail("missing key 'clips'");
  const auto clips = n.at("clips");
  if (clips.array().empty()) clips.fail("must not be empty");
  std::set<std::string> names;
  for (std::size_t i = 0; i < clips.array().size(); ++i) {
    const auto c = clips.at(i);
    c.require_object({"path", "label", "name", "first_frame", "max_frames"});
    if (!c.has("path")) c.fail("missing key 'path'");
    if (!c.has("label")) c.fail("missing key 'label'");
    ClipConfig clip;
    const std::filesystem::path p = c.at("path").string();
    clip.path = (p.is_absolute() || base_dir.empty() ? p : base_dir / p).string();
    clip.label = c.at("label").string();
    if (clip.label.empty()) c.at("label").fail("must not be empty");
    clip.name = c.has("name") ? c.at("name").string() : p.stem().string();
    convert(c, [&] { return video_dir_name(clip.name); });
    if (!names.insert(clip.name).second) c.fail("duplicate clip name '" + clip.name + "'");
    if (c.has("first_frame")) clip.first_frame = c.at("first_frame").count(0);
    if (c.has("max_frames")) clip.max_frames = c.at("max_frames").count(1);
    r.clips.push_back(std::move(clip));
  }
  return r;
}

std::vector<SweepConfig> parse_sweeps(const Node& n) {
  std::vector<SweepConfig> out;
  for (std::size_t i = 0; i < n.array().size(); ++i) {
    const auto s = n.at(i);
    s.require_object({"factor", "x1", "delta", "count", "preset"});
    if (!s.has("factor")) s.fail("missing key 'factor'");
    SweepConfig sw;
    sw.factor = convert(s.at("factor"), [&] { return parse_factor(s.at("factor").string()); });
    if (s.has("preset")) {
      if (s.at("preset").string() != "standard") s.at("preset").fail("the only preset is 'standard'");
      const auto preset = standard_sweep(sw.factor, SceneSpec{});
      sw.x1 = preset.x1;
      sw.delta = preset.delta;
      sw.count = preset.count;
    }
    if (s.has("x1")) sw.x1 = s.at("x1").number();
    if (s.has("delta")) {
      sw.delta = s.at("delta").number();
      if (sw.delta == 0.0) s.at("delta").fail("must be non-zero");
    }
    if (s.has("count")) sw.count = s.at("count").count(1, 1'000'000);
    if (sw.factor == SweepFactor::distance) {
      const double last = sw.x1 + static_cast<double>(sw.count - 1) * sw.delta;
      if (!(sw.x1 > 0.0) || !(last > 0.0)) s.fail("distance sweep must stay > 0");
    }
    if (sw.factor == SweepFactor::elevation) {
      for (std::size_t k = 0; k < sw.count; ++k) {
        if (std::abs(sw.x1 + static_cast<double>(k) * sw.delta) >= 90.0) s.fail("elevation sweep must stay inside (-90, 90)");
      }
    }
    out.push_back(sw);
  }
  return out;
}

}  // namespace

Config parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const Node root(doc, "");
  root.require_object({"render", "sweeps", "transforms", "evaluate", "report"});
  Config cfg;
  if (root.has("render")) cfg.render = parse_render(root.at("render"), base_dir);
  if (root.has("sweeps")) cfg.sweeps = parse_sweeps(root.at("sweeps"));
  if (root.has("transforms")) {
    const auto t = root.at("transforms");
    for (std::size_t i = 0; i < t.array().size(); ++i) {
      const auto item = t.at(i);
      item.require_object({"kind", "params"});
      cfg.transforms.push_back(convert(item, [&] { return item.value().get<ImageTransformSpec>(); }));
    }
  }
  if (root.has("evaluate")) {
    const auto e = root.at("evaluate");
    e.require_object({"model", "features", "jobs", "timeout_s"});
    if (e.has("model")) {
      cfg.evaluate.model = e.at("model").string();
      convert(e.at("model"), [&] { return EndpointSpec::parse(cfg.evaluate.model); });
    }
    if (e.has("features")) cfg.evaluate.features = e.at("features").strings(false);
    if (e.has("jobs")) cfg.evaluate.jobs = e.at("jobs").count(1, 256);
    if (e.has("timeout_s")) cfg.evaluate.timeout_s = e.at("timeout_s").number(1e-3, 1e6);
  }
  if (root.has("report")) {
    const auto r = root.at("report");
    r.require_object({"smoothing_window", "tau_lo", "tau_hi", "drop_threshold", "pca_dims"});
    if (r.has("smoothing_window")) {
      cfg.report.smoothing_window = r.at("smoothing_window").count(1);
      if (cfg.report.smoothing_window % 2 == 0) r.at("smoothing_window").fail("must be odd");
    }
    if (r.has("tau_lo")) cfg.report.thresholds.lo = r.at("tau_lo").number(0.0, 1.0);
    if (r.has("tau_hi")) cfg.report.thresholds.hi = r.at("tau_hi").number(0.0, 1.0);
    if (cfg.report.thresholds.lo > cfg.report.thresholds.hi) r.fail("tau_lo must not exceed tau_hi");
    if (r.has("drop_threshold")) cfg.report.drop_threshold = r.at("drop_threshold").number(0.0, 1.0);
    if (r.has("pca_dims")) cfg.report.pca_dims = r.at("pca_dims").count(1, 64);
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");
  return parse_config(doc, path.parent_path());
}

}  // namespace ipt
