#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipt/types.hpp"

namespace ipt {

enum class TransformKind { identity, average_blur, hist_equalization, grayscale, gaussian_noise, rotate_cw };

const char* transform_name(TransformKind kind);
TransformKind parse_transform_kind(const std::string& name);

/// One image-space transform with its parameters. Fields a kind does not use
/// are ignored.
struct ImageTransformSpec {
  TransformKind kind = TransformKind::identity;
  int kernel = 5;           // average_blur: odd, >= 1
  double sigma = 20.0;      // gaussian_noise: 8-bit scale, >= 0
  std::uint64_t seed = 0;   // gaussian_noise: mixed with the video id
  double angle_deg = 25.0;  // rotate_cw

  void validate() const;
  std::string name() const { return transform_name(kind); }

  friend bool operator==(const ImageTransformSpec&, const ImageTransformSpec&) = default;
};

void to_json(nlohmann::json& j, const ImageTransformSpec& spec);
void from_json(const nlohmann::json& j, ImageTransformSpec& spec);

/// identity, average_blur, hist_equalization, grayscale, gaussian_noise,
/// rotate_cw(25).
std::vector<ImageTransformSpec> default_suite();

/// Applies the transform to every frame; frame count, size and fps are kept.
Video apply_transform(const Video& video, const ImageTransformSpec& spec);

// Per-frame operators, exposed for tests and bindings.
Frame average_blur(const Frame& frame, int kernel);
Frame hist_equalization(const Frame& frame);
Frame grayscale(const Frame& frame);
Frame gaussian_noise(const Frame& frame, double sigma, std::uint64_t seed);
Frame rotate_cw(const Frame& frame, double angle_deg);

}  // namespace ipt
