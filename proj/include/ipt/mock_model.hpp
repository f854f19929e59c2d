#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ipt/protocol.hpp"
#include "ipt/types.hpp"

namespace ipt {

enum class MockMode { uniform, centroid, azimuth_oracle };

const char* mock_mode_name(MockMode mode);
MockMode parse_mock_mode(const std::string& name);

inline constexpr std::size_t kPooledGrid = 8;
inline constexpr std::size_t kPooledSize = kPooledGrid * kPooledGrid * 3;

/// Mean frame of the video block-averaged onto an 8x8 grid, RGB in [0,1].
std::vector<double> pooled_frame(const Video& video);

/// uniform: 1/N each. centroid: softmax of the negative distance between the
/// pooled frame and a seeded prototype per class. azimuth_oracle: class 0
/// scores (1 + cos(2 az)) / 2 and the rest share the remainder equally.
ScoreVector mock_scores(const Video& video, const LabelSpace& labels, MockMode mode, std::uint64_t seed = 0,
                        const std::optional<FactorVector>& factors = std::nullopt);

/// Deterministic stand-in model. Advertises two feature tags: "pooled" (the
/// pooled frame) and "consensus" (the score vector).
class MockModel : public ModelHandler {
 public:
  MockModel(LabelSpace labels, MockMode mode, std::uint64_t seed = 0);

  const LabelSpace& labels() const override { return labels_; }
  std::vector<std::string> features() const override { return {"consensus", "pooled"}; }
  std::string name() const override { return std::string("mock-") + mock_mode_name(mode_); }
  InferResponse infer(const InferRequest& request) const override;

 private:
  LabelSpace labels_;
  MockMode mode_;
  std::uint64_t seed_;
};

}  // namespace ipt
