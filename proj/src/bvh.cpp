#include "ipt/bvh.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "ipt/errors.hpp"

namespace ipt {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::x_position:
      return "Xposition";
    case Channel::y_position:
      return "Yposition";
    case Channel::z_position:
      return "Zposition";
    case Channel::x_rotation:
      return "Xrotation";
    case Channel::y_rotation:
      return "Yrotation";
    case Channel::z_rotation:
      return "Zrotation";
  }
  return "?";
}

bool is_rotation(Channel c) {
  return c == Channel::x_rotation || c == Channel::y_rotation || c == Channel::z_rotation;
}

Skeleton::Skeleton(std::vector<Joint> joints) : joints_(std::move(joints)) {
  if (joints_.empty()) throw DataError("skeleton has no joints");
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    auto& j = joints_[i];
    if (i == 0 && j.parent) throw DataError("skeleton root must not have a parent");
    if (i > 0 && (!j.parent || *j.parent >= i)) {
      throw DataError("joint '" + j.name + "' must reference a previously declared parent");
    }
    if (j.end_site && !j.channels.empty()) throw DataError("end site '" + j.name + "' cannot carry channels");
    j.first_channel = channel_count_;
    channel_count_ += j.channels.size();
  }
}

std::optional<std::size_t> Skeleton::find(std::string_view name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == name) return i;
  }
  return std::nullopt;
}

MotionClip::MotionClip(Skeleton skeleton, double frame_time, std::vector<std::vector<double>> frames,
                       std::string activity_label)
    : skeleton_(std::move(skeleton)),
      frame_time_(frame_time),
      frames_(std::move(frames)),
      activity_label_(std::move(activity_label)) {
  if (!(frame_time_ > 0.0)) throw DataError("motion frame time must be positive");
  if (frames_.empty()) throw DataError("motion clip needs at least one frame");
  for (const auto& row : frames_) {
    if (row.size() != skeleton_.channel_count()) throw DataError("motion row length differs from channel count");
  }
}

MotionClip MotionClip::sub_clip(std::size_t first, std::size_t count) const {
  if (first >= frames_.size()) throw DataError("sub-clip starts past the last frame");
  const std::size_t last = std::min(frames_.size(), first + count);
  std::vector<std::vector<double>> rows(frames_.begin() + static_cast<std::ptrdiff_t>(first),
                                        frames_.begin() + static_cast<std::ptrdiff_t>(last));
  return MotionClip(skeleton_, frame_time_, std::move(rows), activity_label_);
}

namespace {

struct Token {
  std::string_view text;
  std::size_t line;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) {
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < src.size()) {
      const char c = src[i];
      if (c == '\n') {
        ++line;
        ++i;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++i;
      } else {
        const std::size_t start = i;
        while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i]))) ++i;
        tokens_.push_back({src.substr(start, i - start), line});
      }
    }
    last_line_ = line;
  }

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t line() const { return done() ? last_line_ : tokens_[pos_].line; }
  const Token& peek() const { return tokens_[pos_]; }

  Token next(const char* expecting) {
    if (done()) {
      throw BvhParseError(BvhParseError::Code::structure, last_line_,
                          std::string("unexpected end of input, expected ") + expecting);
    }
    return tokens_[pos_++];
  }

  void expect(std::string_view keyword) {
    const auto t = next(std::string(keyword).c_str());
    if (t.text != keyword) {
      throw BvhParseError(BvhParseError::Code::lexical, t.line,
                          "expected '" + std::string(keyword) + "', found '" + std::string(t.text) + "'");
    }
  }

  double number(const char* what) {
    const auto t = next(what);
    return to_number(t, what);
  }

  static double to_number(const Token& t, const char* what) {
    double value = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw BvhParseError(BvhParseError::Code::lexical, t.line,
                          std::string("expected ") + what + ", found '" + std::string(t.text) + "'");
    }
    return value;
  }

  std::size_t position() const { return pos_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  void seek(std::size_t pos) { pos_ = pos; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 1;
};

Channel parse_channel(const Token& t) {
  static constexpr std::pair<std::string_view, Channel> kNames[] = {
      {"Xposition", Channel::x_position}, {"Yposition", Channel::y_position}, {"Zposition", Channel::z_position},
      {"Xrotation", Channel::x_rotation}, {"Yrotation", Channel::y_rotation}, {"Zrotation", Channel::z_rotation}};
  for (const auto& [name, ch] : kNames) {
    if (t.text == name) return ch;
  }
  throw BvhParseError(BvhParseError::Code::lexical, t.line, "unknown channel '" + std::string(t.text) + "'");
}

class HierarchyParser {
 public:
  explicit HierarchyParser(Lexer& lex) : lex_(lex) {}

  std::vector<Joint> parse() {
    lex_.expect("HIERARCHY");
    lex_.expect("ROOT");
    parse_joint(std::nullopt, false);
    return std::move(joints_);
  }

 private:
  void parse_joint(std::optional<std::size_t> parent, bool end_site) {
    Joint joint;
    joint.parent = parent;
    joint.end_site = end_site;
    const auto name = lex_.next("joint name");
    if (end_site) {
      if (name.text != "Site") {
        throw BvhParseError(BvhParseError::Code::lexical, name.line, "expected 'Site' after 'End'");
      }
      joint.name = joints_[*parent].name + "_end";
    } else {
      if (name.text == "{") throw BvhParseError(BvhParseError::Code::structure, name.line, "joint is missing a name");
      joint.name = std::string(name.text);
    }
    const auto open = lex_.next("'{'");
    if (open.text != "{") {
      throw BvhParseError(BvhParseError::Code::unbalanced_braces, open.line,
                          "expected '{' after joint '" + joint.name + "'");
    }
    lex_.expect("OFFSET");
    for (int k = 0; k < 3; ++k) joint.offset[k] = lex_.number("offset component");

    if (!end_site) {
      lex_.expect("CHANNELS");
      const auto count_tok = lex_.next("channel count");
      const double count = Lexer::to_number(count_tok, "channel count");
      if (count < 0 || count > 6 || count != std::floor(count)) {
        throw BvhParseError(BvhParseError::Code::lexical, count_tok.line, "channel count must be an integer 0..6");
      }
      for (int k = 0; k < static_cast<int>(count); ++k) {
        const auto t = lex_.next("channel name");
        if (t.text == "}" || t.text == "JOINT" || t.text == "End") {
          throw BvhParseError(BvhParseError::Code::channel_count, count_tok.line,
                              "joint '" + joint.name + "' declares " + std::to_string(static_cast<int>(count)) +
                                  " channels but lists " + std::to_string(k));
        }
        joint.channels.push_back(parse_channel(t));
      }
    }

    const std::size_t index = joints_.size();
    joints_.push_back(std::move(joint));

    while (true) {
      if (lex_.done()) {
        throw BvhParseError(BvhParseError::Code::unbalanced_braces, lex_.line(),
                            "unterminated block for joint '" + joints_[index].name + "'");
      }
      const auto t = lex_.next("'}'");
      if (t.text == "}") return;
      if (end_site) {
        throw BvhParseError(BvhParseError::Code::lexical, t.line, "unexpected '" + std::string(t.text) + "' in End Site");
      }
      if (t.text == "JOINT") {
        parse_joint(index, false);
      } else if (t.text == "End") {
        parse_joint(index, true);
      } else if (t.text == "MOTION") {
        throw BvhParseError(BvhParseError::Code::unbalanced_braces, t.line,
                            "MOTION reached with joint '" + joints_[index].name + "' still open");
      } else {
        throw BvhParseError(BvhParseError::Code::lexical, t.line, "unexpected token '" + std::string(t.text) + "'");
      }
    }
  }

  Lexer& lex_;
  std::vector<Joint> joints_;
};

}  // namespace

MotionClip parse_bvh(std::string_view text, std::string activity_label) {
  Lexer lex(text);
  HierarchyParser hierarchy(lex);
  auto joints = hierarchy.parse();

  const auto motion = lex.next("MOTION");
  if (motion.text == "}") throw BvhParseError(BvhParseError::Code::unbalanced_braces, motion.line, "unmatched '}'");
  if (motion.text != "MOTION") {
    throw BvhParseError(BvhParseError::Code::lexical, motion.line,
                        "expected 'MOTION', found '" + std::string(motion.text) + "'");
  }
  const std::size_t motion_line = motion.line;
  lex.expect("Frames:");
  const auto frames_tok = lex.next("frame count");
  const double declared = Lexer::to_number(frames_tok, "frame count");
  if (declared < 1 || declared != std::floor(declared)) {
    throw BvhParseError(BvhParseError::Code::frame_count, frames_tok.line, "frame count must be a positive integer");
  }
  lex.expect("Frame");
  lex.expect("Time:");
  const auto time_tok = lex.next("frame time");
  const double frame_time = Lexer::to_number(time_tok, "frame time");
  if (!(frame_time > 0.0)) throw BvhParseError(BvhParseError::Code::lexical, time_tok.line, "frame time must be > 0");

  Skeleton skeleton;
  try {
    skeleton = Skeleton(std::move(joints));
  } catch (const DataError& e) {
    throw BvhParseError(BvhParseError::Code::structure, motion_line, e.what());
  }
  const std::size_t width = skeleton.channel_count();

  // One motion row per source line.
  std::vector<std::vector<double>> rows;
  while (!lex.done()) {
    const std::size_t line = lex.peek().line;
    std::vector<double> row;
    while (!lex.done() && lex.peek().line == line) row.push_back(Lexer::to_number(lex.next("value"), "motion value"));
    if (row.size() != width) {
      throw BvhParseError(BvhParseError::Code::channel_count, line,
                          "motion row has " + std::to_string(row.size()) + " values, expected " + std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != static_cast<std::size_t>(declared)) {
    throw BvhParseError(BvhParseError::Code::frame_count, motion_line,
                        "MOTION declares " + std::to_string(static_cast<std::size_t>(declared)) + " frames but has " +
                            std::to_string(rows.size()));
  }
  return MotionClip(std::move(skeleton), frame_time, std::move(rows), std::move(activity_label));
}

MotionClip load_bvh_file(const std::string& path, std::string activity_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open BVH file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_bvh(ss.str(), std::move(activity_label));
  } catch (const BvhParseError& e) {
    throw BvhParseError(e.code(), e.line(), path + ": " + std::string(e.what()));
  }
}

PoseFrame forward_kinematics(const MotionClip& clip, std::size_t frame_index) {
  if (frame_index >= clip.frame_count()) {
    throw DataError("frame index " + std::to_string(frame_index) + " out of range (clip has " +
                    std::to_string(clip.frame_count()) + " frames)");
  }
  const auto& joints = clip.skeleton().joints();
  const auto& row = clip.frames()[frame_index];
  std::vector<Eigen::Isometry3d> world(joints.size());
  PoseFrame pose;
  pose.joint_positions.resize(joints.size());

  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto& j = joints[i];
    Eigen::Vector3d translation = j.offset;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    for (std::size_t c = 0; c < j.channels.size(); ++c) {
      const double v = row[j.first_channel + c];
      const double rad = v * std::numbers::pi / 180.0;
      switch (j.channels[c]) {
        case Channel::x_position:
          translation.x() += v;
          break;
        case Channel::y_position:
          translation.y() += v;
          break;
        case Channel::z_position:
          translation.z() += v;
          break;
        case Channel::x_rotation:
          rotation = rotation * Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitX()).toRotationMatrix();
          break;
        case Channel::y_rotation:
          rotation = rotation * Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitY()).toRotationMatrix();
          break;
        case Channel::z_rotation:
          rotation = rotation * Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitZ()).toRotationMatrix();
          break;
      }
    }
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.linear() = rotation;
    local.translation() = translation;
    world[i] = j.parent ? world[*j.parent] * local : local;
    pose.joint_positions[i] = world[i].translation();
  }
  return pose;
}

double clip_duration(const MotionClip& clip) {
  return static_cast<double>(clip.frame_count()) * clip.frame_time();
}

}  // namespace ipt
