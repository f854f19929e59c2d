#include "ipt/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ipt/errors.hpp"

namespace ipt {

Frame::Frame(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) throw DataError("frame dimensions must be positive");
  if (pixels_.size() != std::size_t{width_} * height_ * 3) {
    throw DataError("frame buffer holds " + std::to_string(pixels_.size()) + " bytes, expected " +
                    std::to_string(std::size_t{width_} * height_ * 3));
  }
}

Frame Frame::filled(std::uint32_t width, std::uint32_t height, Rgb color) {
  std::vector<std::uint8_t> pixels(std::size_t{width} * height * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = color.r;
    pixels[i + 1] = color.g;
    pixels[i + 2] = color.b;
  }
  return Frame(width, height, std::move(pixels));
}

Rgb Frame::at(std::uint32_t x, std::uint32_t y) const {
  const std::size_t i = (std::size_t{y} * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

Mask::Mask(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ == 0 || height_ == 0) throw DataError("mask dimensions must be positive");
  if (values_.size() != std::size_t{width_} * height_) throw DataError("mask buffer size does not match dimensions");
  for (auto v : values_) {
    if (v > 1) throw DataError("mask values must be 0 or 1");
  }
}

bool Mask::empty_foreground() const {
  return std::all_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v == 0; });
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

Video::Video(std::string video_id, int class_label, double fps, std::vector<Frame> frames)
    : video_id_(std::move(video_id)), class_label_(class_label), fps_(fps), frames_(std::move(frames)) {
  if (frames_.empty()) throw DataError("video '" + video_id_ + "' has no frames");
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) throw DataError("video '" + video_id_ + "' has non-positive fps");
  for (const auto& f : frames_) {
    if (f.width() != frames_.front().width() || f.height() != frames_.front().height()) {
      throw DataError("video '" + video_id_ + "' mixes frame dimensions");
    }
  }
}

Video Video::with_frames(std::vector<Frame> frames) const {
  return Video(video_id_, class_label_, fps_, std::move(frames));
}

Video Video::with_id(std::string video_id) const {
  return Video(std::move(video_id), class_label_, fps_, frames_);
}

MaskSequence::MaskSequence(std::vector<Mask> masks) : masks_(std::move(masks)) {}

void MaskSequence::check_paired(const Video& video) const {
  if (masks_.size() != video.frame_count()) {
    throw DataError("video '" + video.video_id() + "' has " + std::to_string(video.frame_count()) + " frames but " +
                    std::to_string(masks_.size()) + " masks");
  }
  for (std::size_t i = 0; i < masks_.size(); ++i) {
    if (masks_[i].width() != video.width() || masks_[i].height() != video.height()) {
      throw DataError("video '" + video.video_id() + "' mask " + std::to_string(i) + " dimensions differ from frame");
    }
  }
}

double normalize_azimuth(double degrees) {
  double a = std::fmod(degrees, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a = 0.0;  // -tiny + 360 rounds up to 360
  return a;
}

FactorVector FactorVector::normalized() const {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg)) throw ConfigError("factor angles must be finite");
  if (!(distance > 0.0) || !std::isfinite(distance)) throw ConfigError("factor distance must be > 0");
  if (!(light_intensity >= 0.0) || !std::isfinite(light_intensity)) {
    throw ConfigError("factor light_intensity must be >= 0");
  }
  FactorVector out = *this;
  out.azimuth_deg = normalize_azimuth(azimuth_deg);
  return out;
}

LabelSpace::LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("label space is empty");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw DataError("label names must be non-empty");
    if (!seen.insert(l).second) throw DataError("duplicate label '" + l + "'");
  }
}

std::optional<int> LabelSpace::find(const std::string& name) const {
  auto it = std::find(labels_.begin(), labels_.end(), name);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

void check_scores(const ScoreVector& scores, std::size_t label_count) {
  if (scores.size() != label_count) {
    throw DataError("score vector has " + std::to_string(scores.size()) + " entries, expected " +
                    std::to_string(label_count));
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw DataError("score vector contains a non-finite value");
  }
}

std::string Condition::label() const {
  switch (kind) {
    case Kind::original:
      return "original";
    case Kind::foreground:
      return "foreground";
    case Kind::background:
      return "background";
    case Kind::transformed:
      return "transformed:" + name;
    case Kind::sweep:
      return "sweep:" + factor;
  }
  return "unknown";
}

void to_json(nlohmann::json& j, const FactorVector& f) {
  j = nlohmann::json{{"azimuth_deg", f.azimuth_deg},     {"elevation_deg", f.elevation_deg},
                     {"distance", f.distance},           {"appearance_id", f.appearance_id},
                     {"background_id", f.background_id}, {"light_intensity", f.light_intensity}};
}

void from_json(const nlohmann::json& j, FactorVector& f) {
  f.azimuth_deg = j.at("azimuth_deg").get<double>();
  f.elevation_deg = j.at("elevation_deg").get<double>();
  f.distance = j.at("distance").get<double>();
  f.appearance_id = j.at("appearance_id").get<std::string>();
  f.background_id = j.at("background_id").get<std::string>();
  f.light_intensity = j.at("light_intensity").get<double>();
}

namespace {

const char* kind_name(Condition::Kind k) {
  switch (k) {
    case Condition::Kind::original:
      return "original";
    case Condition::Kind::foreground:
      return "foreground";
    case Condition::Kind::background:
      return "background";
    case Condition::Kind::transformed:
      return "transformed";
    case Condition::Kind::sweep:
      return "sweep";
  }
  return "original";
}

}  // namespace

void to_json(nlohmann::json& j, const Condition& c) {
  j = nlohmann::json{{"kind", kind_name(c.kind)}};
  if (c.kind == Condition::Kind::transformed) j["name"] = c.name;
  if (c.kind == Condition::Kind::sweep) {
    j["factor"] = c.factor;
    j["value"] = c.value;
    j["series"] = c.series;
  }
}

void from_json(const nlohmann::json& j, Condition& c) {
  const auto kind = j.at("kind").get<std::string>();
  c = Condition{};
  if (kind == "original") {
    c.kind = Condition::Kind::original;
  } else if (kind == "foreground") {
    c.kind = Condition::Kind::foreground;
  } else if (kind == "background") {
    c.kind = Condition::Kind::background;
  } else if (kind == "transformed") {
    c.kind = Condition::Kind::transformed;
    c.name = j.at("name").get<std::string>();
  } else if (kind == "sweep") {
    c.kind = Condition::Kind::sweep;
    c.factor = j.at("factor").get<std::string>();
    c.value = j.at("value").get<double>();
    c.series = j.value("series", std::string{});
  } else {
    throw DataError("unknown condition kind '" + kind + "'");
  }
}

}  // namespace ipt
