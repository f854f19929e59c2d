#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace ipt {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// One RGB8 raster, row-major, immutable after construction.
class Frame {
 public:
  Frame(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels);
  static Frame filled(std::uint32_t width, std::uint32_t height, Rgb color);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  Rgb at(std::uint32_t x, std::uint32_t y) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<std::uint8_t> pixels_;
};

/// Binary raster, 1 = person foreground.
class Mask {
 public:
  Mask(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> values);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::span<const std::uint8_t> values() const noexcept { return values_; }
  bool at(std::uint32_t x, std::uint32_t y) const { return values_[std::size_t{y} * width_ + x] != 0; }
  bool empty_foreground() const;
  std::size_t count() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<std::uint8_t> values_;
};

class Video {
 public:
  Video(std::string video_id, int class_label, double fps, std::vector<Frame> frames);

  const std::string& video_id() const noexcept { return video_id_; }
  int class_label() const noexcept { return class_label_; }
  double fps() const noexcept { return fps_; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::size_t frame_count() const noexcept { return frames_.size(); }
  std::uint32_t width() const noexcept { return frames_.front().width(); }
  std::uint32_t height() const noexcept { return frames_.front().height(); }

  /// Same metadata, new frames. Used by every transform.
  Video with_frames(std::vector<Frame> frames) const;
  Video with_id(std::string video_id) const;

  friend bool operator==(const Video&, const Video&) = default;

 private:
  std::string video_id_;
  int class_label_;
  double fps_;
  std::vector<Frame> frames_;
};

class MaskSequence {
 public:
  explicit MaskSequence(std::vector<Mask> masks);

  const std::vector<Mask>& masks() const noexcept { return masks_; }
  std::size_t size() const noexcept { return masks_.size(); }

  /// Throws DataError unless count and per-frame dimensions match `video`.
  void check_paired(const Video& video) const;

  friend bool operator==(const MaskSequence&, const MaskSequence&) = default;

 private:
  std::vector<Mask> masks_;
};

double normalize_azimuth(double degrees);

/// Nuisance factors of one rendered video.
struct FactorVector {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double distance = 100.0;
  std::string appearance_id = "a0";
  std::string background_id = "flat_gray";
  double light_intensity = 1.0;

  /// Azimuth folded into [0,360); throws ConfigError on distance <= 0 or
  /// negative light.
  FactorVector normalized() const;

  friend bool operator==(const FactorVector&, const FactorVector&) = default;
};

class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& name(std::size_t id) const { return labels_.at(id); }
  std::optional<int> find(const std::string& name) const;

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

using ScoreVector = std::vector<double>;

/// Throws DataError if the length is wrong or any value is non-finite.
void check_scores(const ScoreVector& scores, std::size_t label_count);

/// The evaluation condition a video (and its prediction record) belongs to.
struct Condition {
  enum class Kind { original, foreground, background, transformed, sweep };

  Kind kind = Kind::original;
  std::string name;    // transform name
  std::string factor;  // swept factor
  double value = 0.0;  // swept factor value
  std::string series;  // groups sweep points into one curve

  static Condition original() { return {}; }
  static Condition foreground() { return {Kind::foreground, {}, {}, 0.0, {}}; }
  static Condition background() { return {Kind::background, {}, {}, 0.0, {}}; }
  static Condition transformed(std::string name) { return {Kind::transformed, std::move(name), {}, 0.0, {}}; }
  static Condition sweep(std::string factor, double value, std::string series) {
    return {Kind::sweep, {}, std::move(factor), value, std::move(series)};
  }

  /// Short label such as "original", "transformed:grayscale", "sweep:azimuth".
  std::string label() const;

  friend bool operator==(const Condition&, const Condition&) = default;
};

void to_json(nlohmann::json& j, const FactorVector& f);
void from_json(const nlohmann::json& j, FactorVector& f);
void to_json(nlohmann::json& j, const Condition& c);
void from_json(const nlohmann::json& j, Condition& c);

}  // namespace ipt
