#include "ipt/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "ipt/errors.hpp"
#include "ipt/png_io.hpp"

namespace ipt {
namespace fs = std::filesystem;

namespace {

std::string numbered(const char* stem, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%06zu.png", stem, index);
  return buf;
}

std::vector<fs::path> numbered_files(const fs::path& dir, const std::string& prefix) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with(prefix) && name.ends_with(".png")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

const VideoEntry* DatasetManifest::find(const std::string& id) const {
  for (const auto& v : videos) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

Condition DatasetManifest::condition_of(const VideoEntry& entry) const {
  return entry.sweep ? *entry.sweep : condition;
}

void to_json(nlohmann::json& j, const DatasetManifest& m) {
  nlohmann::json videos = nlohmann::json::array();
  for (const auto& v : m.videos) {
    nlohmann::json e{{"id", v.id}, {"path", v.path}, {"label", v.label}};
    e["mask_path"] = v.mask_path ? nlohmann::json(*v.mask_path) : nlohmann::json(nullptr);
    e["factors"] = v.factors ? nlohmann::json(*v.factors) : nlohmann::json(nullptr);
    if (v.sweep) e["sweep"] = *v.sweep;
    videos.push_back(std::move(e));
  }
  j = nlohmann::json{{"fps", m.fps}, {"labels", m.labels.labels()}, {"videos", std::move(videos)}};
  if (m.condition.kind != Condition::Kind::original) j["condition"] = m.condition;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  auto field = [](const nlohmann::json& obj, const char* key, const std::string& where) -> const nlohmann::json& {
    if (!obj.is_object() || !obj.contains(key)) throw DataError(where + ": missing key '" + key + "'");
    return obj.at(key);
  };
  DatasetManifest m;
  try {
    m.fps = field(j, "fps", "manifest").get<double>();
    if (!(m.fps > 0.0)) throw DataError("manifest: key 'fps' must be positive");
    m.labels = LabelSpace(field(j, "labels", "manifest").get<std::vector<std::string>>());
    if (j.contains("condition")) m.condition = j.at("condition").get<Condition>();
    std::set<std::string> ids;
    const auto& videos = field(j, "videos", "manifest");
    if (!videos.is_array()) throw DataError("manifest: key 'videos' must be an array");
    for (std::size_t i = 0; i < videos.size(); ++i) {
      const auto& e = videos[i];
      const std::string where = "manifest videos[" + std::to_string(i) + "]";
      VideoEntry v;
      v.id = field(e, "id", where).get<std::string>();
      v.path = field(e, "path", where).get<std::string>();
      v.label = field(e, "label", where).get<int>();
      if (v.label < 0 || static_cast<std::size_t>(v.label) >= m.labels.size()) {
        throw DataError(where + ": key 'label' out of range for video '" + v.id + "'");
      }
      if (e.contains("mask_path") && !e.at("mask_path").is_null()) v.mask_path = e.at("mask_path").get<std::string>();
      if (e.contains("factors") && !e.at("factors").is_null()) v.factors = e.at("factors").get<FactorVector>();
      if (e.contains("sweep")) v.sweep = e.at("sweep").get<Condition>();
      if (!ids.insert(v.id).second) throw DataError(where + ": duplicate video_id '" + v.id + "'");
      m.videos.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("manifest: ") + ex.what());
  }
  return m;
}

Dataset::Dataset(fs::path root, DatasetManifest manifest) : root_(std::move(root)), manifest_(std::move(manifest)) {}

Video Dataset::load_video(std::size_t index) const {
  const auto& entry = manifest_.videos.at(index);
  const auto files = numbered_files(root_ / entry.path, "frame_");
  if (files.empty()) throw DataError("video '" + entry.id + "' has no frame files under '" + entry.path + "'");
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_frame_png(f));
  return Video(entry.id, entry.label, manifest_.fps, std::move(frames));
}

std::optional<MaskSequence> Dataset::load_masks(std::size_t index) const {
  const auto& entry = manifest_.videos.at(index);
  if (!entry.mask_path) return std::nullopt;
  std::vector<Mask> masks;
  for (const auto& f : numbered_files(root_ / *entry.mask_path, "mask_")) masks.push_back(read_mask_png(f));
  if (masks.empty()) throw DataError("video '" + entry.id + "' has no mask files under '" + *entry.mask_path + "'");
  return MaskSequence(std::move(masks));
}

Dataset load_dataset(const fs::path& root) {
  const auto manifest_path = root / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw DataError("missing manifest '" + manifest_path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw DataError("malformed JSON in '" + manifest_path.string() + "': " + ex.what());
  }
  auto manifest = manifest_from_json(j);
  for (const auto& v : manifest.videos) {
    if (!fs::is_directory(root / v.path)) {
      throw DataError("dangling path '" + v.path + "' for video_id '" + v.id + "'");
    }
    if (v.mask_path && !fs::is_directory(root / *v.mask_path)) {
      throw DataError("dangling mask_path '" + *v.mask_path + "' for video_id '" + v.id + "'");
    }
  }
  return Dataset(root, std::move(manifest));
}

std::string video_dir_name(const std::string& video_id) {
  if (video_id.empty() || video_id == "." || video_id == "..") throw DataError("invalid video_id '" + video_id + "'");
  for (char c : video_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.' || c == '+' || c == '=';
    if (!ok) throw DataError("video_id '" + video_id + "' contains characters unsafe for a path");
  }
  return video_id;
}

DatasetWriter::DatasetWriter(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  const fs::path videos = root_ / "videos";
  if (fs::exists(videos)) {
    if (!fs::exists(root_ / "manifest.json")) {
      throw DataError("'" + videos.string() + "' exists but is not part of a dataset; refusing to overwrite");
    }
    fs::remove_all(videos, ec);
    if (ec) throw DataError("cannot clear '" + videos.string() + "': " + ec.message());
  }
  fs::remove(root_ / "manifest.json", ec);
  fs::create_directories(videos, ec);
  if (ec) throw DataError("cannot create '" + videos.string() + "': " + ec.message());
}

void DatasetWriter::write_video(VideoEntry& entry, const Video& video, const MaskSequence* masks) {
  if (entry.id != video.video_id()) throw DataError("manifest entry '" + entry.id + "' does not match its video");
  const std::string rel = "videos/" + video_dir_name(entry.id);
  const fs::path dir = root_ / rel;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  for (std::size_t f = 0; f < video.frame_count(); ++f) write_png(dir / numbered("frame", f), video.frames()[f]);
  entry.path = rel;
  entry.mask_path.reset();
  if (masks) {
    masks->check_paired(video);
    for (std::size_t f = 0; f < masks->size(); ++f) write_png(dir / numbered("mask", f), masks->masks()[f]);
    entry.mask_path = rel;
  }
}

void DatasetWriter::finish(const DatasetManifest& manifest) {
  const auto manifest_path = root_ / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + manifest_path.string() + "'");
  out << nlohmann::json(manifest).dump(2) << '\n';
  if (!out) throw DataError("I/O failure writing '" + manifest_path.string() + "'");
}

void save_dataset(DatasetManifest manifest, const std::vector<Video>& videos,
                  const std::vector<std::optional<MaskSequence>>& masks, const fs::path& root) {
  if (manifest.videos.size() != videos.size()) throw DataError("manifest and video list differ in length");
  if (!masks.empty() && masks.size() != videos.size()) throw DataError("mask list must be empty or match videos");
  DatasetWriter writer(root);
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const MaskSequence* m = (!masks.empty() && masks[i]) ? &*masks[i] : nullptr;
    writer.write_video(manifest.videos[i], videos[i], m);
  }
  writer.finish(manifest);
}

}  // namespace ipt
