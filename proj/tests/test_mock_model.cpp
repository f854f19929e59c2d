#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ipt/errors.hpp"
#include "ipt/mock_model.hpp"
#include "ipt/random.hpp"
#include "test_util.hpp"

using namespace ipt;

namespace {

FactorVector at_azimuth(double az) {
  FactorVector f;
  f.azimuth_deg = az;
  return f;
}

const LabelSpace kFive({"a", "b", "c", "d", "e"});

}  // namespace

TEST(Mock, UniformIsOneOverN) {
  std::mt19937_64 rng(1);
  const auto s = mock_scores(test::random_video(rng, "v", 2), kFive, MockMode::uniform);
  EXPECT_EQ(s, ScoreVector(5, 0.2));
}

TEST(Mock, AzimuthOracle) {
  std::mt19937_64 rng(2);
  const auto v = test::random_video(rng, "v", 1);
  EXPECT_NEAR(mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(90))[0], 0.0, 1e-12);
  EXPECT_NEAR(mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(270))[0], 0.0, 1e-12);
  EXPECT_EQ(mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(0))[0], 1.0);
  EXPECT_EQ(mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(180))[0], 1.0);
  const auto s = mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(60));
  EXPECT_NEAR(s[0], 0.25, 1e-12);
  for (int i = 1; i < 5; ++i) EXPECT_NEAR(s[i], 0.75 / 4, 1e-12);
  // Azimuth is periodic.
  EXPECT_EQ(mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(400)),
            mock_scores(v, kFive, MockMode::azimuth_oracle, 0, at_azimuth(40)));
  EXPECT_THROW(mock_scores(v, kFive, MockMode::azimuth_oracle), DataError);
}

TEST(Mock, PooledFrameBlockMeans) {
  std::mt19937_64 rng(3);
  const auto v = test::random_video(rng, "v", 2, 16, 16);
  const auto pooled = pooled_frame(v);
  ASSERT_EQ(pooled.size(), kPooledSize);
  for (std::size_t gy = 0; gy < 8; ++gy) {
    for (std::size_t gx = 0; gx < 8; ++gx) {
      for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0;
        for (const auto& f : v.frames())
          for (std::size_t y = 2 * gy; y < 2 * gy + 2; ++y)
            for (std::size_t x = 2 * gx; x < 2 * gx + 2; ++x) sum += f.pixels()[(y * 16 + x) * 3 + c];
        EXPECT_NEAR(pooled[(gy * 8 + gx) * 3 + c], sum / (8 * 255.0), 1e-12);
      }
    }
  }
  const Video flat("f", 0, 30, {Frame::filled(40, 33, {255, 0, 51})});
  for (std::size_t cell = 0; cell < 64; ++cell) {
    EXPECT_DOUBLE_EQ(pooled_frame(flat)[cell * 3], 1.0);
    EXPECT_DOUBLE_EQ(pooled_frame(flat)[cell * 3 + 2], 0.2);
  }
}

TEST(Mock, CentroidIsSoftmaxOfNegativeDistance) {
  std::mt19937_64 rng(4);
  const auto v = test::random_video(rng, "v", 3);
  const auto s = mock_scores(v, kFive, MockMode::centroid, 17);
  EXPECT_EQ(s, mock_scores(v, kFive, MockMode::centroid, 17));
  EXPECT_NE(s, mock_scores(v, kFive, MockMode::centroid, 18));
  double total = 0;
  for (double x : s) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);

  const auto pooled = pooled_frame(v);
  std::vector<double> dist;
  for (std::size_t c = 0; c < 5; ++c) {
    std::mt19937_64 proto(derive_seed(17, "prototype", kFive.name(c)));
    double d2 = 0;
    for (double p : pooled) d2 += std::pow(p - uniform_unit(proto), 2);
    dist.push_back(std::sqrt(d2));
  }
  for (std::size_t c = 1; c < 5; ++c) EXPECT_NEAR(std::log(s[0] / s[c]), dist[c] - dist[0], 1e-9);
}

TEST(Mock, ModelServesFeatures) {
  std::mt19937_64 rng(5);
  const auto v = test::random_video(rng, "vid", 2);
  const MockModel model(kFive, MockMode::centroid, 3);
  const auto r = model.infer(InferRequest::from_video(v, {"consensus", "pooled"}));
  EXPECT_EQ(r.video_id, "vid");
  EXPECT_EQ(r.scores, mock_scores(v, kFive, MockMode::centroid, 3));
  EXPECT_EQ(r.features.at("consensus").shape, std::vector<std::int64_t>{5});
  EXPECT_EQ(r.features.at("consensus").values[2], static_cast<float>(r.scores[2]));
  EXPECT_EQ(r.features.at("pooled").values.size(), kPooledSize);
  EXPECT_EQ(model.name(), "mock-centroid");
  EXPECT_EQ(model.features(), (std::vector<std::string>{"consensus", "pooled"}));
  EXPECT_TRUE(model.infer(InferRequest::from_video(v)).features.empty());
}

TEST(Mock, ModeNames) {
  for (auto m : {MockMode::uniform, MockMode::centroid, MockMode::azimuth_oracle}) {
    EXPECT_EQ(parse_mock_mode(mock_mode_name(m)), m);
  }
  EXPECT_THROW(parse_mock_mode("oracle"), ConfigError);
}
