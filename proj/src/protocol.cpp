#include "ipt/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace ipt {
namespace {

constexpr std::uint8_t kMagic[4] = {'I', 'P', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::string serialize_header(const nlohmann::json& header) {
  if (!header.is_object()) throw ProtocolError(ProtocolError::Code::bad_message, "message header must be a JSON object");
  try {
    return header.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw ProtocolError(ProtocolError::Code::invalid_utf8, std::string("header is not valid UTF-8: ") + e.what());
  }
}

nlohmann::json parse_header(std::span<const std::uint8_t> bytes) {
  if (!valid_utf8(bytes)) throw ProtocolError(ProtocolError::Code::invalid_utf8, "header is not valid UTF-8");
  nlohmann::json header = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (header.is_discarded()) throw ProtocolError(ProtocolError::Code::invalid_json, "header is not valid JSON");
  if (!header.is_object()) throw ProtocolError(ProtocolError::Code::invalid_json, "header must be a JSON object");
  return header;
}

void check_header_size(std::uint64_t n) {
  if (n > kMaxHeaderBytes) {
    throw ProtocolError(ProtocolError::Code::oversize,
                        "header length " + std::to_string(n) + " exceeds " + std::to_string(kMaxHeaderBytes));
  }
}

void check_payload_size(std::uint64_t n) {
  if (n > kMaxPayloadBytes) {
    throw ProtocolError(ProtocolError::Code::oversize,
                        "payload length " + std::to_string(n) + " exceeds " + std::to_string(kMaxPayloadBytes));
  }
}

[[noreturn]] void truncated(const char* what, std::uint64_t expected, std::uint64_t received) {
  throw ProtocolError(ProtocolError::Code::truncated, std::string("truncated ") + what + ": expected " +
                                                          std::to_string(expected) + " bytes, received " +
                                                          std::to_string(received));
}

// Fills `out` completely; returns the number of bytes actually read.
std::size_t read_full(ByteSource& source, std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const std::size_t n = source.read_some(out.subspan(got));
    if (n == 0) break;
    got += n;
  }
  return got;
}

std::vector<std::uint8_t> floats_to_le(std::span<const float> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 4);
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

std::vector<float> le_to_floats(std::span<const std::uint8_t> bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(bytes.data() + 4 * i, 4)));
  }
  return out;
}

nlohmann::json versioned(nlohmann::json header) {
  header["v"] = kProtocolVersion;
  return header;
}

const nlohmann::json& require(const nlohmann::json& header, const char* key) {
  if (!header.contains(key)) {
    throw ProtocolError(ProtocolError::Code::bad_message, std::string("message is missing field '") + key + "'");
  }
  return header.at(key);
}

void check_version(const nlohmann::json& header) {
  const auto& v = require(header, "v");
  if (!v.is_number_integer() || v.get<std::int64_t>() != kProtocolVersion) {
    throw ProtocolError(ProtocolError::Code::bad_message, "unsupported protocol version " + v.dump());
  }
}

std::string msg_type(const nlohmann::json& header) {
  const auto& m = require(header, "msg");
  if (!m.is_string()) throw ProtocolError(ProtocolError::Code::bad_message, "field 'msg' must be a string");
  return m.get<std::string>();
}

std::uint64_t shape_product(const std::vector<std::int64_t>& shape) {
  std::uint64_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw ProtocolError(ProtocolError::Code::bad_message, "negative feature dimension");
    n *= static_cast<std::uint64_t>(d);
    if (n > kMaxPayloadBytes) throw ProtocolError(ProtocolError::Code::oversize, "feature shape too large");
  }
  return n;
}

}  // namespace

bool valid_utf8(std::span<const std::uint8_t> bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    const std::uint8_t c = bytes[i];
    int extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + static_cast<std::size_t>(extra) >= bytes.size()) return false;
    for (int k = 1; k <= extra; ++k) {
      const std::uint8_t cc = bytes[i + k];
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += static_cast<std::size_t>(extra) + 1;
  }
  return true;
}

std::vector<std::uint8_t> encode_message(const nlohmann::json& header, std::span<const std::uint8_t> payload) {
  const std::string text = serialize_header(header);
  check_header_size(text.size());
  check_payload_size(payload.size());
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 + text.size() + 8 + payload.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  put_u64(out, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Message decode_message(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  SpanSource source(bytes);
  std::size_t total = 0;
  struct Counting : ByteSource {
    ByteSource& inner;
    std::size_t& count;
    Counting(ByteSource& s, std::size_t& c) : inner(s), count(c) {}
    std::size_t read_some(std::span<std::uint8_t> out) override {
      const auto n = inner.read_some(out);
      count += n;
      return n;
    }
  } counting(source, total);
  auto msg = read_message(counting);
  if (!msg) truncated("magic", 4, 0);
  if (consumed) *consumed = total;
  return std::move(*msg);
}

std::optional<Message> read_message(ByteSource& source) {
  std::uint8_t magic[4];
  const std::size_t got_magic = read_full(source, magic);
  if (got_magic == 0) return std::nullopt;
  if (got_magic < 4) truncated("magic", 4, got_magic);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw ProtocolError(ProtocolError::Code::bad_magic,
                        "bad magic '" + std::string(reinterpret_cast<const char*>(magic), 4) + "'");
  }
  std::uint8_t len4[4];
  if (const auto n = read_full(source, len4); n < 4) truncated("header length", 4, n);
  const std::uint64_t header_len = get_le(len4, 4);
  check_header_size(header_len);
  std::vector<std::uint8_t> header_bytes(header_len);
  if (const auto n = read_full(source, header_bytes); n < header_len) truncated("header", header_len, n);
  std::uint8_t len8[8];
  if (const auto n = read_full(source, len8); n < 8) truncated("payload length", 8, n);
  const std::uint64_t payload_len = get_le(len8, 8);
  check_payload_size(payload_len);
  Message msg;
  msg.header = parse_header(header_bytes);
  // Grow in chunks so a lying length cannot force a huge allocation up front.
  constexpr std::size_t kChunk = std::size_t{1} << 20;
  while (msg.payload.size() < payload_len) {
    const std::size_t before = msg.payload.size();
    const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, payload_len - before));
    msg.payload.resize(before + want);
    const std::size_t n = read_full(source, std::span(msg.payload).subspan(before, want));
    if (n < want) truncated("payload", payload_len, before + n);
  }
  return msg;
}

void write_message(ByteSink& sink, const nlohmann::json& header, std::span<const std::uint8_t> payload) {
  sink.write_all(encode_message(header, payload));
}

std::size_t SpanSource::read_some(std::span<std::uint8_t> out) {
  const std::size_t n = std::min(out.size(), bytes_.size() - pos_);
  std::memcpy(out.data(), bytes_.data() + pos_, n);
  pos_ += n;
  return n;
}

InferRequest InferRequest::from_video(const Video& video, std::vector<std::string> want_features,
                                      std::optional<FactorVector> factors) {
  InferRequest r;
  r.video_id = video.video_id();
  r.width = video.width();
  r.height = video.height();
  r.frame_count = static_cast<std::uint32_t>(video.frame_count());
  r.fps = video.fps();
  r.want_features = std::move(want_features);
  r.factors = std::move(factors);
  r.payload.reserve(std::size_t{r.width} * r.height * 3 * r.frame_count);
  for (const auto& f : video.frames()) r.payload.insert(r.payload.end(), f.pixels().begin(), f.pixels().end());
  return r;
}

Video InferRequest::to_video(int class_label) const {
  const std::size_t frame_bytes = std::size_t{width} * height * 3;
  if (width == 0 || height == 0 || frame_count == 0 || payload.size() != frame_bytes * frame_count) {
    throw ProtocolError(ProtocolError::Code::bad_message,
                        "payload holds " + std::to_string(payload.size()) + " bytes, expected " +
                            std::to_string(frame_bytes * frame_count));
  }
  std::vector<Frame> frames;
  frames.reserve(frame_count);
  for (std::size_t f = 0; f < frame_count; ++f) {
    const auto* p = payload.data() + f * frame_bytes;
    frames.emplace_back(width, height, std::vector<std::uint8_t>(p, p + frame_bytes));
  }
  return Video(video_id, class_label, fps, std::move(frames));
}

// --- client ---------------------------------------------------------------

ModelClient::ModelClient(std::unique_ptr<Connection> connection) : connection_(std::move(connection)) {
  write_message(*connection_, versioned({{"msg", "hello"}}));
  const Message reply = receive();
  if (msg_type(reply.header) != "hello") {
    throw ProtocolError(ProtocolError::Code::bad_message, "expected hello reply, got '" + msg_type(reply.header) + "'");
  }
  try {
    handshake_.labels = LabelSpace(require(reply.header, "labels").get<std::vector<std::string>>());
    if (reply.header.contains("features")) {
      handshake_.features = reply.header.at("features").get<std::vector<std::string>>();
    }
    handshake_.name = reply.header.value("name", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(ProtocolError::Code::bad_message, std::string("malformed hello reply: ") + e.what());
  } catch (const DataError& e) {
    throw ProtocolError(ProtocolError::Code::bad_message, std::string("malformed hello reply: ") + e.what());
  }
}

ModelClient ModelClient::connect(const EndpointSpec& spec, Timeout timeout) {
  return ModelClient(open_connection(spec, timeout));
}

Message ModelClient::receive() {
  auto msg = read_message(*connection_);
  if (!msg) throw EndpointError("model closed the connection");
  check_version(msg->header);
  if (msg_type(msg->header) == "error") {
    throw ProtocolError(ProtocolError::Code::remote, msg->header.value("detail", std::string("unspecified model error")));
  }
  return std::move(*msg);
}

InferResponse ModelClient::infer(const InferRequest& request) {
  nlohmann::json header{{"msg", "infer"},
                        {"id", request.video_id},
                        {"w", request.width},
                        {"h", request.height},
                        {"n", request.frame_count},
                        {"fps", request.fps},
                        {"want", request.want_features}};
  if (request.factors) header["factors"] = *request.factors;
  write_message(*connection_, versioned(std::move(header)), request.payload);

  InferResponse response;
  const Message scores = receive();
  if (msg_type(scores.header) != "scores") {
    throw ProtocolError(ProtocolError::Code::bad_message, "expected scores, got '" + msg_type(scores.header) + "'");
  }
  try {
    response.video_id = require(scores.header, "id").get<std::string>();
    const auto k = require(scores.header, "k").get<std::uint64_t>();
    if (k != handshake_.labels.size() || scores.payload.size() != 4 * k) {
      throw ProtocolError(ProtocolError::Code::bad_message,
                          "score message carries " + std::to_string(scores.payload.size()) + " bytes for k=" +
                              std::to_string(k) + " (label count " + std::to_string(handshake_.labels.size()) + ")");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(ProtocolError::Code::bad_message, std::string("malformed scores: ") + e.what());
  }
  if (response.video_id != request.video_id) {
    throw ProtocolError(ProtocolError::Code::bad_message,
                        "response id '" + response.video_id + "' does not match request '" + request.video_id + "'");
  }
  for (float f : le_to_floats(scores.payload)) response.scores.push_back(static_cast<double>(f));
  try {
    check_scores(response.scores, handshake_.labels.size());
  } catch (const DataError& e) {
    throw ProtocolError(ProtocolError::Code::bad_message, e.what());
  }

  for (std::size_t i = 0; i < request.want_features.size(); ++i) {
    const Message feature = receive();
    if (msg_type(feature.header) != "feature") {
      throw ProtocolError(ProtocolError::Code::bad_message, "expected feature, got '" + msg_type(feature.header) + "'");
    }
    FeatureTensor tensor;
    std::string tag;
    try {
      tag = require(feature.header, "tag").get<std::string>();
      tensor.shape = require(feature.header, "shape").get<std::vector<std::int64_t>>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(ProtocolError::Code::bad_message, std::string("malformed feature: ") + e.what());
    }
    if (feature.payload.size() != 4 * shape_product(tensor.shape)) {
      throw ProtocolError(ProtocolError::Code::bad_message, "feature '" + tag + "' payload does not match its shape");
    }
    tensor.values = le_to_floats(feature.payload);
    response.features[tag] = std::move(tensor);
  }
  return response;
}

// --- server ---------------------------------------------------------------

namespace {

InferRequest parse_infer(const Message& msg) {
  InferRequest r;
  try {
    r.video_id = require(msg.header, "id").get<std::string>();
    r.width = require(msg.header, "w").get<std::uint32_t>();
    r.height = require(msg.header, "h").get<std::uint32_t>();
    r.frame_count = require(msg.header, "n").get<std::uint32_t>();
    r.fps = msg.header.value("fps", 30.0);
    if (msg.header.contains("want")) r.want_features = msg.header.at("want").get<std::vector<std::string>>();
    if (msg.header.contains("factors") && !msg.header.at("factors").is_null()) {
      r.factors = msg.header.at("factors").get<FactorVector>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(ProtocolError::Code::bad_message, std::string("malformed infer request: ") + e.what());
  }
  const std::uint64_t expected = std::uint64_t{r.width} * r.height * 3 * r.frame_count;
  if (msg.payload.size() != expected) {
    throw ProtocolError(ProtocolError::Code::bad_message, "infer payload holds " + std::to_string(msg.payload.size()) +
                                                              " bytes, expected " + std::to_string(expected));
  }
  r.payload = msg.payload;
  return r;
}

void send_error(ByteSink& out, const std::string& detail) {
  try {
    write_message(out, versioned({{"msg", "error"}, {"detail", detail}}));
  } catch (const std::exception&) {
    // Peer already gone.
  }
}

}  // namespace

bool serve(ByteSource& in, ByteSink& out, const ModelHandler& handler) {
  bool greeted = false;
  try {
    while (true) {
      auto msg = read_message(in);
      if (!msg) return true;
      check_version(msg->header);
      const std::string type = msg_type(msg->header);
      if (type == "hello") {
        greeted = true;
        write_message(out, versioned({{"msg", "hello"},
                                      {"labels", handler.labels().labels()},
                                      {"features", handler.features()},
                                      {"name", handler.name()}}));
      } else if (type == "infer") {
        if (!greeted) throw ProtocolError(ProtocolError::Code::bad_message, "infer before hello");
        const InferRequest request = parse_infer(*msg);
        const InferResponse response = handler.infer(request);
        std::vector<float> scores(response.scores.begin(), response.scores.end());
        write_message(out, versioned({{"msg", "scores"}, {"id", request.video_id}, {"k", scores.size()}}),
                      floats_to_le(scores));
        for (const auto& tag : request.want_features) {
          const auto it = response.features.find(tag);
          if (it == response.features.end()) {
            throw ProtocolError(ProtocolError::Code::bad_message, "feature '" + tag + "' is not available");
          }
          write_message(out, versioned({{"msg", "feature"}, {"tag", tag}, {"shape", it->second.shape}}),
                        floats_to_le(it->second.values));
        }
      } else {
        throw ProtocolError(ProtocolError::Code::bad_message, "unknown message type '" + type + "'");
      }
    }
  } catch (const std::exception& e) {
    send_error(out, e.what());
    return false;
  }
}

}  // namespace ipt
