#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipt/errors.hpp"
#include "ipt/types.hpp"

namespace ipt {

// Frame layout: "IPT1" | u32 LE header length | UTF-8 JSON header |
//               u64 LE payload length | payload

inline constexpr std::uint32_t kProtocolVersion = 1;
inline constexpr std::size_t kMaxHeaderBytes = std::size_t{16} << 20;
inline constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 30;

class ProtocolError : public EndpointError {
 public:
  enum class Code { bad_magic, truncated, oversize, invalid_utf8, invalid_json, bad_message, remote };

  ProtocolError(Code code, const std::string& detail) : EndpointError(detail), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

struct Message {
  nlohmann::json header;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Message&, const Message&) = default;
};

std::vector<std::uint8_t> encode_message(const nlohmann::json& header, std::span<const std::uint8_t> payload = {});

/// Decodes the frame at the start of `bytes`; `consumed` receives its size.
Message decode_message(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);

bool valid_utf8(std::span<const std::uint8_t> bytes);

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  /// Reads up to `out.size()` bytes; returns 0 only at end of stream.
  virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
};

class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write_all(std::span<const std::uint8_t> bytes) = 0;
};

/// Returns nullopt on a clean end of stream at a frame boundary.
std::optional<Message> read_message(ByteSource& source);
void write_message(ByteSink& sink, const nlohmann::json& header, std::span<const std::uint8_t> payload = {});

class SpanSource : public ByteSource {
 public:
  explicit SpanSource(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::size_t read_some(std::span<std::uint8_t> out) override;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class VectorSink : public ByteSink {
 public:
  void write_all(std::span<const std::uint8_t> bytes) override { data.insert(data.end(), bytes.begin(), bytes.end()); }
  std::vector<std::uint8_t> data;
};

// --- messages -------------------------------------------------------------

struct FeatureTensor {
  std::vector<std::int64_t> shape;
  std::vector<float> values;

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;
};

struct InferRequest {
  std::string video_id;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t frame_count = 0;
  double fps = 30.0;
  std::vector<std::string> want_features;
  std::optional<FactorVector> factors;  // forwarded for adapters that need scene metadata
  std::vector<std::uint8_t> payload;    // RGB8, frame-major, row-major

  static InferRequest from_video(const Video& video, std::vector<std::string> want_features = {},
                                 std::optional<FactorVector> factors = std::nullopt);
  /// Rebuilds the frames; throws ProtocolError on a payload length mismatch.
  Video to_video(int class_label = 0) const;
};

struct InferResponse {
  std::string video_id;
  ScoreVector scores;
  std::map<std::string, FeatureTensor> features;

  friend bool operator==(const InferResponse&, const InferResponse&) = default;
};

struct Handshake {
  LabelSpace labels;
  std::vector<std::string> features;
  std::string name;
};

// --- transports -----------------------------------------------------------

class Connection : public ByteSource, public ByteSink {};

/// "tcp:HOST:PORT" or "exec:COMMAND..."
struct EndpointSpec {
  enum class Transport { tcp, exec };
  Transport transport = Transport::exec;
  std::string host;
  std::uint16_t port = 0;
  std::string command;

  static EndpointSpec parse(const std::string& text);
  std::string to_string() const;
};

using Timeout = std::chrono::milliseconds;
inline constexpr Timeout kDefaultTimeout{120'000};

std::unique_ptr<Connection> open_connection(const EndpointSpec& spec, Timeout timeout = kDefaultTimeout);

/// Client half of the protocol: one handshake, then strictly serial
/// request/response exchanges.
class ModelClient {
 public:
  explicit ModelClient(std::unique_ptr<Connection> connection);
  static ModelClient connect(const EndpointSpec& spec, Timeout timeout = kDefaultTimeout);

  const Handshake& handshake() const noexcept { return handshake_; }
  InferResponse infer(const InferRequest& request);

 private:
  Message receive();

  std::unique_ptr<Connection> connection_;
  Handshake handshake_;
};

// --- server side ----------------------------------------------------------

class ModelHandler {
 public:
  virtual ~ModelHandler() = default;
  virtual const LabelSpace& labels() const = 0;
  virtual std::vector<std::string> features() const = 0;
  virtual std::string name() const = 0;
  /// Must return scores for every label and every requested feature.
  virtual InferResponse infer(const InferRequest& request) const = 0;
};

/// Serves one connection until end of stream. Protocol violations are
/// answered with {"msg":"error"} and end the session; returns false then.
bool serve(ByteSource& in, ByteSink& out, const ModelHandler& handler);

/// Serves stdin/stdout.
bool serve_stdio(const ModelHandler& handler);

/// Accepts TCP connections on `port` (0 = ephemeral) and serves each on its
/// own thread. `on_listen` receives the bound port. Runs until `max_connections`
/// connections have been served (0 = forever).
void serve_tcp(std::uint16_t port, const ModelHandler& handler, std::size_t max_connections = 0,
               const std::function<void(std::uint16_t)>& on_listen = {});

}  // namespace ipt
