#include "ipt/mock_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ipt/random.hpp"

namespace ipt {

const char* mock_mode_name(MockMode mode) {
  switch (mode) {
    case MockMode::uniform:
      return "uniform";
    case MockMode::centroid:
      return "centroid";
    case MockMode::azimuth_oracle:
      return "azimuth_oracle";
  }
  return "?";
}

MockMode parse_mock_mode(const std::string& name) {
  if (name == "uniform") return MockMode::uniform;
  if (name == "centroid") return MockMode::centroid;
  if (name == "azimuth_oracle") return MockMode::azimuth_oracle;
  throw ConfigError("unknown mock mode '" + name + "'");
}

std::vector<double> pooled_frame(const Video& video) {
  const std::size_t w = video.width();
  const std::size_t h = video.height();
  std::vector<double> sums(kPooledSize, 0.0);
  std::vector<std::size_t> counts(kPooledGrid * kPooledGrid, 0);
  for (const auto& frame : video.frames()) {
    const auto px = frame.pixels();
    for (std::size_t y = 0; y < h; ++y) {
      const std::size_t gy = y * kPooledGrid / h;
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t cell = gy * kPooledGrid + x * kPooledGrid / w;
        const std::size_t i = (y * w + x) * 3;
        for (std::size_t c = 0; c < 3; ++c) sums[cell * 3 + c] += px[i + c];
        ++counts[cell];
      }
    }
  }
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    for (std::size_t c = 0; c < 3; ++c) {
      sums[cell * 3 + c] = counts[cell] ? sums[cell * 3 + c] / (255.0 * static_cast<double>(counts[cell])) : 0.0;
    }
  }
  return sums;
}

ScoreVector mock_scores(const Video& video, const LabelSpace& labels, MockMode mode, std::uint64_t seed,
                        const std::optional<FactorVector>& factors) {
  const std::size_t n = labels.size();
  ScoreVector scores(n, 1.0 / static_cast<double>(n));
  switch (mode) {
    case MockMode::uniform:
      break;
    case MockMode::azimuth_oracle: {
      if (!factors) throw DataError("azimuth_oracle needs scene factors for video '" + video.video_id() + "'");
      const double az = normalize_azimuth(factors->azimuth_deg);
      const double s0 = (1.0 + std::cos(2.0 * az * std::numbers::pi / 180.0)) / 2.0;
      scores[0] = s0;
      for (std::size_t i = 1; i < n; ++i) scores[i] = (1.0 - s0) / static_cast<double>(n - 1);
      break;
    }
    case MockMode::centroid: {
      const auto pooled = pooled_frame(video);
      std::vector<double> logits(n);
      for (std::size_t c = 0; c < n; ++c) {
        std::mt19937_64 rng(derive_seed(seed, "prototype", labels.name(c)));
        double d2 = 0.0;
        for (double v : pooled) {
          const double diff = v - uniform_unit(rng);
          d2 += diff * diff;
        }
        logits[c] = -std::sqrt(d2);
      }
      double top = logits[0];
      for (double l : logits) top = std::max(top, l);
      double total = 0.0;
      for (std::size_t c = 0; c < n; ++c) total += (scores[c] = std::exp(logits[c] - top));
      for (auto& s : scores) s /= total;
      break;
    }
  }
  return scores;
}

MockModel::MockModel(LabelSpace labels, MockMode mode, std::uint64_t seed)
    : labels_(std::move(labels)), mode_(mode), seed_(seed) {}

InferResponse MockModel::infer(const InferRequest& request) const {
  const Video video = request.to_video();
  InferResponse response;
  response.video_id = request.video_id;
  response.scores = mock_scores(video, labels_, mode_, seed_, request.factors);
  for (const auto& tag : request.want_features) {
    if (tag == "consensus") {
      FeatureTensor t{{static_cast<std::int64_t>(response.scores.size())}, {}};
      for (double s : response.scores) t.values.push_back(static_cast<float>(s));
      response.features[tag] = std::move(t);
    } else if (tag == "pooled") {
      FeatureTensor t{{static_cast<std::int64_t>(kPooledSize)}, {}};
      for (double v : pooled_frame(video)) t.values.push_back(static_cast<float>(v));
      response.features[tag] = std::move(t);
    }
  }
  return response;
}

}  // namespace ipt
