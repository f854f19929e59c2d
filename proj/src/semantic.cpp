#include "ipt/semantic.hpp"

#include "ipt/errors.hpp"

namespace ipt {

SemanticSplit split_fg_bg(const Video& video, const MaskSequence& masks) {
  masks.check_paired(video);
  SemanticSplit out;
  out.source_frames = video.frame_count();
  std::vector<Frame> fg_frames;
  std::vector<Frame> bg_frames;
  for (std::size_t f = 0; f < video.frame_count(); ++f) {
    const Mask& mask = masks.masks()[f];
    if (mask.empty_foreground()) {
      out.dropped_frames.push_back(f);
      continue;
    }
    const auto src = video.frames()[f].pixels();
    std::vector<std::uint8_t> fg(src.size(), 0);
    std::vector<std::uint8_t> bg(src.size(), 0);
    const auto m = mask.values();
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto& dst = m[i] ? fg : bg;
      dst[3 * i] = src[3 * i];
      dst[3 * i + 1] = src[3 * i + 1];
      dst[3 * i + 2] = src[3 * i + 2];
    }
    fg_frames.emplace_back(video.width(), video.height(), std::move(fg));
    bg_frames.emplace_back(video.width(), video.height(), std::move(bg));
  }
  if (!fg_frames.empty()) {
    out.foreground = Video(video.video_id() + "_fg", video.class_label(), video.fps(), std::move(fg_frames));
    out.background = Video(video.video_id() + "_bg", video.class_label(), video.fps(), std::move(bg_frames));
  }
  return out;
}

std::vector<std::string> filter_undetected(const std::vector<std::pair<std::string, double>>& pairs, double threshold) {
  std::vector<std::string> kept;
  for (const auto& [id, fraction] : pairs) {
    if (fraction <= threshold) kept.push_back(id);
  }
  return kept;
}

}  // namespace ipt
