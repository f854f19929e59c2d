#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ipt/types.hpp"

namespace ipt {

struct VideoEntry {
  std::string id;
  std::string path;  // relative to the dataset root
  int label = 0;
  std::optional<std::string> mask_path;
  std::optional<FactorVector> factors;
  // Set for videos produced by a factor sweep; kind is always sweep.
  std::optional<Condition> sweep;

  friend bool operator==(const VideoEntry&, const VideoEntry&) = default;
};

struct DatasetManifest {
  double fps = 30.0;
  LabelSpace labels;
  std::vector<VideoEntry> videos;
  Condition condition;

  const VideoEntry* find(const std::string& id) const;
  /// Condition of one entry: its sweep point if any, else the dataset-wide one.
  Condition condition_of(const VideoEntry& entry) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
/// Structural parse; path existence is checked by load_dataset.
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// A manifest bound to a root directory; videos are decoded on demand.
class Dataset {
 public:
  Dataset(std::filesystem::path root, DatasetManifest manifest);

  const std::filesystem::path& root() const noexcept { return root_; }
  const DatasetManifest& manifest() const noexcept { return manifest_; }
  std::size_t size() const noexcept { return manifest_.videos.size(); }

  Video load_video(std::size_t index) const;
  std::optional<MaskSequence> load_masks(std::size_t index) const;

 private:
  std::filesystem::path root_;
  DatasetManifest manifest_;
};

Dataset load_dataset(const std::filesystem::path& root);

/// Incremental writer: video directories are emitted as they arrive and the
/// manifest is written last. Any previous dataset at `root` is replaced.
class DatasetWriter {
 public:
  explicit DatasetWriter(std::filesystem::path root);

  /// Writes frames (and masks when given); fills entry.path / entry.mask_path.
  void write_video(VideoEntry& entry, const Video& video, const MaskSequence* masks = nullptr);
  void finish(const DatasetManifest& manifest);

 private:
  std::filesystem::path root_;
};

/// Writes manifest.json plus one directory of frame_%06d.png (and
/// mask_%06d.png when masks are given) per video. `masks` is empty or
/// parallel to `videos`. Entry paths in `manifest` are rewritten to the
/// emitted layout.
void save_dataset(DatasetManifest manifest, const std::vector<Video>& videos,
                  const std::vector<std::optional<MaskSequence>>& masks, const std::filesystem::path& root);

/// Directory name used for a video id; rejects ids that are not safe path
/// components.
std::string video_dir_name(const std::string& video_id);

}  // namespace ipt
