#include <gtest/gtest.h>

#include <set>

#include "ipt/errors.hpp"
#include "ipt/render.hpp"
#include "ipt/semantic.hpp"
#include "test_util.hpp"

using namespace ipt;

namespace {

Mask checker(std::uint32_t w, std::uint32_t h) {
  std::vector<std::uint8_t> v;
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x) v.push_back(static_cast<std::uint8_t>((x + y) % 2));
  return Mask(w, h, v);
}

Mask filled(std::uint32_t w, std::uint32_t h, std::uint8_t value) {
  return Mask(w, h, std::vector<std::uint8_t>(std::size_t{w} * h, value));
}

// fg + bg per byte; masks are complementary so no sum exceeds the original.
void expect_reconstructs(const Video& original, const MaskSequence& masks, const SemanticSplit& split) {
  std::size_t k = 0;
  for (std::size_t f = 0; f < original.frame_count(); ++f) {
    if (masks.masks()[f].empty_foreground()) continue;
    const auto o = original.frames()[f].pixels();
    const auto a = split.foreground->frames()[k].pixels();
    const auto b = split.background->frames()[k].pixels();
    for (std::size_t i = 0; i < o.size(); ++i) {
      ASSERT_EQ(a[i] + b[i], o[i]) << "frame " << f << " byte " << i;
      ASSERT_TRUE(a[i] == 0 || b[i] == 0);
    }
    ++k;
  }
  EXPECT_EQ(k, split.foreground->frame_count());
}

}  // namespace

TEST(Split, CheckerboardReconstructs) {
  std::mt19937_64 rng(1);
  const Video v = test::random_video(rng, "v", 3, 9, 7);
  const MaskSequence m({checker(9, 7), checker(9, 7), checker(9, 7)});
  const auto s = split_fg_bg(v, m);
  ASSERT_TRUE(s.foreground && s.background);
  expect_reconstructs(v, m, s);
  EXPECT_EQ(s.foreground->video_id(), "v_fg");
  EXPECT_EQ(s.background->video_id(), "v_bg");
  EXPECT_TRUE(s.dropped_frames.empty());
}

TEST(Split, AllOnesMask) {
  std::mt19937_64 rng(2);
  const Video v = test::random_video(rng, "v", 2);
  const auto s = split_fg_bg(v, MaskSequence({filled(16, 12, 1), filled(16, 12, 1)}));
  EXPECT_EQ(s.foreground->frames(), v.frames());
  for (const auto& f : s.background->frames()) EXPECT_EQ(f, Frame::filled(16, 12, {0, 0, 0}));
}

TEST(Split, DropsEmptyMaskFrames) {
  std::mt19937_64 rng(3);
  const Video v = test::random_video(rng, "v", 10);
  std::vector<Mask> ms;
  for (int i = 0; i < 10; ++i) ms.push_back(i == 6 ? filled(16, 12, 0) : test::random_mask(rng, 16, 12));
  ms[2] = checker(16, 12);
  const MaskSequence m(ms);
  const auto s = split_fg_bg(v, m);
  EXPECT_EQ(s.foreground->frame_count(), 9u);
  EXPECT_EQ(s.background->frame_count(), 9u);
  EXPECT_EQ(s.dropped_frames, std::vector<std::size_t>{6});
  EXPECT_EQ(s.source_frames, 10u);
  EXPECT_DOUBLE_EQ(s.dropped_fraction(), 0.1);
  expect_reconstructs(v, m, s);
  // Indices are compacted: output frame 6 comes from source frame 7.
  EXPECT_EQ(s.foreground->frames()[6], split_fg_bg(Video("x", 0, 30, {v.frames()[7]}), MaskSequence({ms[7]})).foreground->frames()[0]);
}

TEST(Split, AllDropped) {
  std::mt19937_64 rng(4);
  const Video v = test::random_video(rng, "v", 2);
  const auto s = split_fg_bg(v, MaskSequence({filled(16, 12, 0), filled(16, 12, 0)}));
  EXPECT_FALSE(s.foreground);
  EXPECT_FALSE(s.background);
  EXPECT_DOUBLE_EQ(s.dropped_fraction(), 1.0);
}

TEST(Split, MismatchRejected) {
  std::mt19937_64 rng(5);
  const Video v = test::random_video(rng, "v", 2);
  EXPECT_THROW(split_fg_bg(v, MaskSequence({filled(16, 12, 1)})), DataError);
  EXPECT_THROW(split_fg_bg(v, MaskSequence({filled(16, 12, 1), filled(8, 12, 1)})), DataError);
}

TEST(Split, RenderedGroundTruthReconstructs) {
  SceneSpec spec;
  spec.clip = std::make_shared<const MotionClip>(load_bvh_file(test::fixture("cmu_walk.bvh")).sub_clip(0, 10));
  spec.focal_length = auto_focal_length(*spec.clip, 64, 100);
  for (const char* bg : {"checker", "speckle", "flat_gray"}) {
    spec.factors.background_id = bg;
    const auto out = render(spec, "r");
    const auto s = split_fg_bg(out.video, out.masks);
    EXPECT_TRUE(s.dropped_frames.empty());
    expect_reconstructs(out.video, out.masks, s);
  }
}

TEST(Filter, Examples) {
  EXPECT_EQ(filter_undetected({{"a", 0.0}, {"b", 0.5}}, 0.2), std::vector<std::string>{"a"});
  EXPECT_EQ(filter_undetected({{"a", 0.0}, {"b", 0.5}, {"c", 1.0}}, 1.0), (std::vector<std::string>{"a", "b", "c"}));
  // The boundary is inclusive: 2 of 10 frames dropped stays, 3 of 10 goes.
  EXPECT_EQ(filter_undetected({{"two", 2.0 / 10}, {"three", 3.0 / 10}}, kDefaultDropThreshold),
            std::vector<std::string>{"two"});
}

TEST(Filter, MatchesBruteForce) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<std::string, double>> pairs;
  for (int i = 0; i < 100; ++i) pairs.emplace_back("id" + std::to_string(i), u(rng));
  for (double threshold : {0.0, 0.2, 0.5, 0.95}) {
    std::set<std::string> want;
    for (const auto& [id, frac] : pairs)
      if (!(frac > threshold)) want.insert(id);
    const auto got = filter_undetected(pairs, threshold);
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), want);
  }
}
