#include <gtest/gtest.h>

#include "ipt/dataset.hpp"
#include "ipt/errors.hpp"
#include "ipt/png_io.hpp"
#include "test_util.hpp"

using namespace ipt;
namespace fs = std::filesystem;

namespace {

struct Sample {
  DatasetManifest manifest;
  std::vector<Video> videos;
  std::vector<std::optional<MaskSequence>> masks;
};

Sample sample(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Sample s;
  s.manifest.fps = 25;
  s.manifest.labels = LabelSpace({"jump", "wave"});
  for (int i = 0; i < 2; ++i) {
    const std::string id = "vid" + std::to_string(i);
    s.videos.push_back(test::random_video(rng, id, 3 + i, 16, 12, i));
    VideoEntry e;
    e.id = id;
    e.label = i;
    if (i == 1) e.factors = FactorVector{30, 10, 120, "a1", "checker", 0.9};
    s.manifest.videos.push_back(e);
    if (i == 0) {
      std::vector<Mask> ms;
      for (int f = 0; f < 3; ++f) ms.push_back(test::random_mask(rng, 16, 12));
      s.masks.emplace_back(MaskSequence(std::move(ms)));
    } else {
      s.masks.emplace_back(std::nullopt);
    }
  }
  return s;
}

}  // namespace

TEST(Dataset, SaveLoadRoundTrip) {
  test::TempDir dir;
  const Sample s = sample(1);
  save_dataset(s.manifest, s.videos, s.masks, dir.path());
  const Dataset d = load_dataset(dir.path());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.manifest().labels, s.manifest.labels);
  EXPECT_EQ(d.manifest().fps, 25);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& e = d.manifest().videos[i];
    EXPECT_EQ(e.id, s.manifest.videos[i].id);
    EXPECT_EQ(e.label, s.manifest.videos[i].label);
    EXPECT_EQ(e.factors, s.manifest.videos[i].factors);
    const Video v = d.load_video(i);
    EXPECT_EQ(v.frames(), s.videos[i].frames());
    EXPECT_EQ(v.class_label(), s.videos[i].class_label());
    EXPECT_EQ(d.load_masks(i), s.masks[i]);
  }
  EXPECT_TRUE(fs::exists(dir.path() / "videos/vid0/mask_000000.png"));
  EXPECT_TRUE(fs::exists(dir.path() / "videos/vid0/frame_000002.png"));
  EXPECT_FALSE(fs::exists(dir.path() / "videos/vid1/mask_000000.png"));
}

TEST(Dataset, ManifestRoundTripIsExact) {
  test::TempDir dir;
  Sample s = sample(2);
  save_dataset(s.manifest, s.videos, s.masks, dir.path());
  const DatasetManifest loaded = load_dataset(dir.path()).manifest();
  // Re-saving the loaded dataset reproduces the manifest field by field.
  test::TempDir again;
  std::vector<Video> videos;
  const Dataset d = load_dataset(dir.path());
  std::vector<std::optional<MaskSequence>> masks;
  for (std::size_t i = 0; i < d.size(); ++i) {
    videos.push_back(d.load_video(i));
    masks.push_back(d.load_masks(i));
  }
  save_dataset(loaded, videos, masks, again.path());
  EXPECT_EQ(load_dataset(again.path()).manifest(), loaded);
  EXPECT_EQ(test::tree(dir.path()), test::tree(again.path()));
}

TEST(Dataset, SaveTwiceIsByteIdentical) {
  test::TempDir a, b;
  const Sample s = sample(3);
  save_dataset(s.manifest, s.videos, s.masks, a.path());
  save_dataset(s.manifest, s.videos, s.masks, b.path());
  EXPECT_EQ(test::tree(a.path()), test::tree(b.path()));
  save_dataset(s.manifest, s.videos, s.masks, a.path());  // overwrite in place
  EXPECT_EQ(test::tree(a.path()), test::tree(b.path()));
}

TEST(Dataset, MissingManifest) {
  test::TempDir dir;
  try {
    load_dataset(dir.path());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("missing manifest"), std::string::npos);
  }
}

TEST(Dataset, MalformedJson) {
  test::TempDir dir;
  test::write_file(dir / "manifest.json", "{\"fps\": 30,");
  EXPECT_THROW(load_dataset(dir.path()), DataError);
}

TEST(Dataset, DanglingPathNamesVideo) {
  test::TempDir dir;
  const Sample s = sample(4);
  save_dataset(s.manifest, s.videos, s.masks, dir.path());
  fs::remove_all(dir.path() / "videos/vid1");
  try {
    load_dataset(dir.path());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("vid1"), std::string::npos) << e.what();
  }
}

TEST(Dataset, DuplicateIdAndMissingKeyNamed) {
  nlohmann::json j = {{"fps", 30},
                      {"labels", {"a"}},
                      {"videos", {{{"id", "x"}, {"path", "p"}, {"label", 0}}, {{"id", "x"}, {"path", "q"}, {"label", 0}}}}};
  try {
    manifest_from_json(j);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate video_id 'x'"), std::string::npos) << e.what();
  }
  j["videos"][1].erase("path");
  try {
    manifest_from_json(j);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'path'"), std::string::npos) << e.what();
  }
  j = {{"fps", 30}, {"labels", {"a"}}, {"videos", {{{"id", "x"}, {"path", "p"}, {"label", 3}}}}};
  EXPECT_THROW(manifest_from_json(j), DataError);
}

TEST(Dataset, ManifestSchemaShape) {
  const Sample s = sample(5);
  const nlohmann::json j = s.manifest;
  EXPECT_TRUE(j.at("fps").is_number());
  EXPECT_EQ(j.at("labels"), nlohmann::json({"jump", "wave"}));
  EXPECT_TRUE(j.at("videos")[0].at("mask_path").is_null());
  EXPECT_TRUE(j.at("videos")[0].at("factors").is_null());
  EXPECT_EQ(j.at("videos")[1].at("factors").at("background_id"), "checker");
}

TEST(Dataset, RefusesToClobberForeignDirectory) {
  test::TempDir dir;
  fs::create_directories(dir.path() / "videos");
  test::write_file(dir / "videos/keep.txt", "x");
  EXPECT_THROW(DatasetWriter{dir.path()}, DataError);
  EXPECT_TRUE(fs::exists(dir / "videos/keep.txt"));
}

TEST(Dataset, UnsafeIdsRejected) {
  EXPECT_THROW(video_dir_name("../x"), DataError);
  EXPECT_THROW(video_dir_name(""), DataError);
  EXPECT_EQ(video_dir_name("walk_a0_azimuth_0001"), "walk_a0_azimuth_0001");
}

TEST(PngIo, MaskGrayLevelsRejected) {
  test::TempDir dir;
  // An RGB frame written as a mask path holds levels other than 0/255.
  write_png(dir / "m.png", Frame::filled(4, 4, {128, 128, 128}));
  EXPECT_THROW(read_mask_png(dir / "m.png"), DataError);
  const Mask m(2, 2, {1, 0, 0, 1});
  write_png(dir / "ok.png", m);
  EXPECT_EQ(read_mask_png(dir / "ok.png"), m);
}

TEST(PngIo, BitDeterministic) {
  test::TempDir dir;
  std::mt19937_64 rng(9);
  const Frame f = test::random_frame(rng, 33, 17);
  write_png(dir / "a.png", f);
  write_png(dir / "b.png", f);
  EXPECT_EQ(test::read_file(dir / "a.png"), test::read_file(dir / "b.png"));
  EXPECT_EQ(read_frame_png(dir / "a.png"), f);
}
