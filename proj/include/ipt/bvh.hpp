#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ipt {

enum class Channel { x_position, y_position, z_position, x_rotation, y_rotation, z_rotation };

const char* channel_name(Channel c);
bool is_rotation(Channel c);

struct Joint {
  std::string name;
  std::optional<std::size_t> parent;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  std::vector<Channel> channels;
  bool end_site = false;
  std::size_t first_channel = 0;  // column of channels[0] in a motion row
};

/// Joint hierarchy in declaration order; parents always precede children.
/// End sites are stored as channel-less leaf joints.
class Skeleton {
 public:
  Skeleton() = default;
  explicit Skeleton(std::vector<Joint> joints);

  const std::vector<Joint>& joints() const noexcept { return joints_; }
  std::size_t size() const noexcept { return joints_.size(); }
  std::size_t channel_count() const noexcept { return channel_count_; }
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::vector<Joint> joints_;
  std::size_t channel_count_ = 0;
};

class MotionClip {
 public:
  MotionClip(Skeleton skeleton, double frame_time, std::vector<std::vector<double>> frames,
             std::string activity_label = {});

  const Skeleton& skeleton() const noexcept { return skeleton_; }
  double frame_time() const noexcept { return frame_time_; }
  const std::vector<std::vector<double>>& frames() const noexcept { return frames_; }
  std::size_t frame_count() const noexcept { return frames_.size(); }
  const std::string& activity_label() const noexcept { return activity_label_; }

  /// Consecutive frames [first, first + count), clamped to the clip.
  MotionClip sub_clip(std::size_t first, std::size_t count) const;

 private:
  Skeleton skeleton_;
  double frame_time_;
  std::vector<std::vector<double>> frames_;
  std::string activity_label_;
};

/// World-space joint positions for one frame, one per skeleton joint.
struct PoseFrame {
  std::vector<Eigen::Vector3d> joint_positions;
};

/// Parses BVH 1.0 text. Throws BvhParseError carrying the source line.
MotionClip parse_bvh(std::string_view text, std::string activity_label = {});
MotionClip load_bvh_file(const std::string& path, std::string activity_label = {});

/// Composes, root to leaf, translate(offset + position channels) followed by
/// the rotation channels as intrinsic rotations in declared order (degrees).
PoseFrame forward_kinematics(const MotionClip& clip, std::size_t frame_index);

double clip_duration(const MotionClip& clip);

}  // namespace ipt
