#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipt/types.hpp"

namespace ipt {

struct SemanticSplit {
  // Empty when every frame was dropped.
  std::optional<Video> foreground;
  std::optional<Video> background;
  std::vector<std::size_t> dropped_frames;
  std::size_t source_frames = 0;

  double dropped_fraction() const {
    return source_frames ? static_cast<double>(dropped_frames.size()) / static_cast<double>(source_frames) : 0.0;
  }
};

/// Black-mask compositing: the foreground video keeps mask=1 pixels, the
/// background video keeps mask=0 pixels. Frames with an all-zero mask are
/// dropped from both; surviving frames are compacted in order. Output ids get
/// "_fg" / "_bg" suffixes.
SemanticSplit split_fg_bg(const Video& video, const MaskSequence& masks);

/// Ids whose dropped fraction is <= threshold, in input order.
std::vector<std::string> filter_undetected(const std::vector<std::pair<std::string, double>>& pairs, double threshold);

inline constexpr double kDefaultDropThreshold = 0.2;

}  // namespace ipt
