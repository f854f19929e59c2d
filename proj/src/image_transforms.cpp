#include "ipt/image_transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "ipt/errors.hpp"
#include "ipt/random.hpp"

namespace ipt {

const char* transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity:
      return "identity";
    case TransformKind::average_blur:
      return "average_blur";
    case TransformKind::hist_equalization:
      return "hist_equalization";
    case TransformKind::grayscale:
      return "grayscale";
    case TransformKind::gaussian_noise:
      return "gaussian_noise";
    case TransformKind::rotate_cw:
      return "rotate_cw";
  }
  return "?";
}

TransformKind parse_transform_kind(const std::string& name) {
  for (auto k : {TransformKind::identity, TransformKind::average_blur, TransformKind::hist_equalization,
                 TransformKind::grayscale, TransformKind::gaussian_noise, TransformKind::rotate_cw}) {
    if (name == transform_name(k)) return k;
  }
  throw ConfigError("unknown transform kind '" + name + "'");
}

void ImageTransformSpec::validate() const {
  if (kind == TransformKind::average_blur && (kernel < 1 || kernel % 2 == 0)) {
    throw ConfigError("average_blur kernel must be odd and >= 1, got " + std::to_string(kernel));
  }
  if (kind == TransformKind::gaussian_noise && !(sigma >= 0.0 && std::isfinite(sigma))) {
    throw ConfigError("gaussian_noise sigma must be >= 0");
  }
  if (kind == TransformKind::rotate_cw && !std::isfinite(angle_deg)) throw ConfigError("rotation angle must be finite");
}

void to_json(nlohmann::json& j, const ImageTransformSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  switch (spec.kind) {
    case TransformKind::average_blur:
      params["kernel"] = spec.kernel;
      break;
    case TransformKind::gaussian_noise:
      params["sigma"] = spec.sigma;
      params["seed"] = spec.seed;
      break;
    case TransformKind::rotate_cw:
      params["angle"] = spec.angle_deg;
      break;
    default:
      break;
  }
  j = nlohmann::json{{"kind", transform_name(spec.kind)}, {"params", std::move(params)}};
}

void from_json(const nlohmann::json& j, ImageTransformSpec& spec) {
  spec = ImageTransformSpec{};
  spec.kind = parse_transform_kind(j.at("kind").get<std::string>());
  const auto params = j.value("params", nlohmann::json::object());
  if (params.contains("kernel")) spec.kernel = params.at("kernel").get<int>();
  if (params.contains("sigma")) spec.sigma = params.at("sigma").get<double>();
  if (params.contains("seed")) spec.seed = params.at("seed").get<std::uint64_t>();
  if (params.contains("angle")) spec.angle_deg = params.at("angle").get<double>();
  spec.validate();
}

std::vector<ImageTransformSpec> default_suite() {
  std::vector<ImageTransformSpec> suite;
  for (auto k : {TransformKind::identity, TransformKind::average_blur, TransformKind::hist_equalization,
                 TransformKind::grayscale, TransformKind::gaussian_noise, TransformKind::rotate_cw}) {
    ImageTransformSpec s;
    s.kind = k;
    suite.push_back(s);
  }
  return suite;
}

namespace {

std::uint8_t clamp_byte(long v) { return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)); }

}  // namespace

Frame average_blur(const Frame& frame, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) throw ConfigError("average_blur kernel must be odd and >= 1");
  const int w = static_cast<int>(frame.width());
  const int h = static_cast<int>(frame.height());
  const int r = kernel / 2;
  const long area = static_cast<long>(kernel) * kernel;
  const auto src = frame.pixels();
  std::vector<std::uint8_t> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long sum[3] = {0, 0, 0};
      for (int dy = -r; dy <= r; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = std::clamp(x + dx, 0, w - 1);
          const std::size_t i = (static_cast<std::size_t>(sy) * w + sx) * 3;
          sum[0] += src[i];
          sum[1] += src[i + 1];
          sum[2] += src[i + 2];
        }
      }
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      for (int c = 0; c < 3; ++c) out[o + c] = static_cast<std::uint8_t>((2 * sum[c] + area) / (2 * area));
    }
  }
  return Frame(frame.width(), frame.height(), std::move(out));
}

Frame hist_equalization(const Frame& frame) {
  const auto src = frame.pixels();
  const std::size_t n = std::size_t{frame.width()} * frame.height();
  std::vector<std::uint8_t> out(src.begin(), src.end());
  for (int c = 0; c < 3; ++c) {
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) ++hist[src[3 * i + c]];
    std::array<std::size_t, 256> cdf{};
    std::size_t running = 0;
    std::size_t cdf_min = 0;
    for (int v = 0; v < 256; ++v) {
      running += hist[v];
      cdf[v] = running;
      if (cdf_min == 0 && running > 0) cdf_min = running;
    }
    // Constant channel: nothing to redistribute.
    if (cdf_min == n) continue;
    // round(255 * (cdf - cdf_min) / (n - cdf_min)) in exact integer arithmetic.
    const std::size_t denom = n - cdf_min;
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) {
      const std::size_t num = cdf[v] >= cdf_min ? cdf[v] - cdf_min : 0;
      lut[v] = static_cast<std::uint8_t>((2 * 255 * num + denom) / (2 * denom));
    }
    for (std::size_t i = 0; i < n; ++i) out[3 * i + c] = lut[src[3 * i + c]];
  }
  return Frame(frame.width(), frame.height(), std::move(out));
}

Frame grayscale(const Frame& frame) {
  const auto src = frame.pixels();
  std::vector<std::uint8_t> out(src.size());
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const unsigned y = (299u * src[i] + 587u * src[i + 1] + 114u * src[i + 2] + 500u) / 1000u;
    out[i] = out[i + 1] = out[i + 2] = static_cast<std::uint8_t>(y);
  }
  return Frame(frame.width(), frame.height(), std::move(out));
}

Frame gaussian_noise(const Frame& frame, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("gaussian_noise sigma must be >= 0");
  const auto src = frame.pixels();
  if (sigma == 0.0) return frame;
  std::vector<std::uint8_t> out(src.size());
  NormalSampler normal(seed);
  for (std::size_t i = 0; i < src.size(); ++i) {
    out[i] = clamp_byte(static_cast<long>(src[i]) + std::lround(sigma * normal()));
  }
  return Frame(frame.width(), frame.height(), std::move(out));
}

Frame rotate_cw(const Frame& frame, double angle_deg) {
  const int w = static_cast<int>(frame.width());
  const int h = static_cast<int>(frame.height());
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  // Quarter turns get exact coefficients so 0/90/180/270 are pure permutations.
  const double turn = std::fmod(std::fmod(angle_deg, 360.0) + 360.0, 360.0);
  const double a = turn * std::numbers::pi / 180.0;
  double cs = std::cos(a);
  double sn = std::sin(a);
  if (turn == 0.0) cs = 1, sn = 0;
  if (turn == 90.0) cs = 0, sn = 1;
  if (turn == 180.0) cs = -1, sn = 0;
  if (turn == 270.0) cs = 0, sn = -1;
  const auto src = frame.pixels();
  std::vector<std::uint8_t> out(src.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // y grows downward, so a visually clockwise turn is the usual
      // counter-clockwise matrix; sample through its inverse.
      const double dx = x - cx;
      const double dy = y - cy;
      double sx = cs * dx + sn * dy + cx;
      double sy = -sn * dx + cs * dy + cy;
      if (std::abs(sx - std::round(sx)) < 1e-9) sx = std::round(sx);
      if (std::abs(sy - std::round(sy)) < 1e-9) sy = std::round(sy);
      if (sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > h - 1) continue;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      for (int c = 0; c < 3; ++c) {
        auto px = [&](int xx, int yy) { return static_cast<double>(src[(static_cast<std::size_t>(yy) * w + xx) * 3 + c]); };
        const double top = px(x0, y0) * (1.0 - fx) + px(x1, y0) * fx;
        const double bottom = px(x0, y1) * (1.0 - fx) + px(x1, y1) * fx;
        out[o + c] = clamp_byte(std::lround(top * (1.0 - fy) + bottom * fy));
      }
    }
  }
  return Frame(frame.width(), frame.height(), std::move(out));
}

Video apply_transform(const Video& video, const ImageTransformSpec& spec) {
  spec.validate();
  std::vector<Frame> frames;
  frames.reserve(video.frame_count());
  const std::uint64_t video_seed = derive_seed(spec.seed, "gaussian_noise", video.video_id());
  for (std::size_t i = 0; i < video.frame_count(); ++i) {
    const Frame& f = video.frames()[i];
    switch (spec.kind) {
      case TransformKind::identity:
        frames.push_back(f);
        break;
      case TransformKind::average_blur:
        frames.push_back(average_blur(f, spec.kernel));
        break;
      case TransformKind::hist_equalization:
        frames.push_back(hist_equalization(f));
        break;
      case TransformKind::grayscale:
        frames.push_back(grayscale(f));
        break;
      case TransformKind::gaussian_noise:
        frames.push_back(gaussian_noise(f, spec.sigma, derive_seed(video_seed, i)));
        break;
      case TransformKind::rotate_cw:
        frames.push_back(rotate_cw(f, spec.angle_deg));
        break;
    }
  }
  return video.with_frames(std::move(frames));
}

}  // namespace ipt
