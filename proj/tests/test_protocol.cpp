#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "ipt/golden.hpp"
#include "ipt/mock_model.hpp"
#include "ipt/protocol.hpp"
#include "test_util.hpp"

using namespace ipt;
using nlohmann::json;
using Bytes = std::vector<std::uint8_t>;

namespace {

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

// Hand-assembled frame, independent of the encoder.
Bytes frame(const std::string& header, const Bytes& payload, std::uint64_t payload_len) {
  Bytes out = bytes_of("IPT1");
  const auto hl = static_cast<std::uint32_t>(header.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(hl >> (8 * i)));
  out.insert(out.end(), header.begin(), header.end());
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(payload_len >> (8 * i)));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bytes frame(const std::string& header, const Bytes& payload = {}) { return frame(header, payload, payload.size()); }

ProtocolError::Code decode_error(const Bytes& b, std::string* what = nullptr) {
  try {
    decode_message(b);
  } catch (const ProtocolError& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ProtocolError::Code::remote;
}

std::string random_string(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"a", "Z", "0", " ", "\"", "\\", "\n", "\t", "é", "漢", "😀", "\x01", "/"};
  std::string s;
  const auto n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

json random_value(std::mt19937_64& rng, int depth) {
  switch (rng() % (depth > 2 ? 5 : 7)) {
    case 0: return nullptr;
    case 1: return (rng() & 1) != 0;
    case 2: return static_cast<std::int64_t>(rng()) >> (rng() % 64);
    case 3: return std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(rng() % 80)) - 1e3;
    case 4: return random_string(rng);
    case 5: {
      json a = json::array();
      for (auto n = rng() % 4; n > 0; --n) a.push_back(random_value(rng, depth + 1));
      return a;
    }
    default: {
      json o = json::object();
      for (auto n = rng() % 4; n > 0; --n) o[random_string(rng)] = random_value(rng, depth + 1);
      return o;
    }
  }
}

// Hands out at most one byte per call.
class TrickleSource : public ByteSource {
 public:
  explicit TrickleSource(const Bytes& b) : bytes_(b) {}
  std::size_t read_some(std::span<std::uint8_t> out) override {
    if (pos_ == bytes_.size() || out.empty()) return 0;
    out[0] = bytes_[pos_++];
    return 1;
  }

 private:
  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

// Decoding must end in a message or a ProtocolError, nothing else.
void decode_totally(const Bytes& b) {
  try {
    std::size_t used = 0;
    decode_message(b, &used);
    EXPECT_LE(used, b.size());
  } catch (const ProtocolError&) {
  }
}

std::string golden(const std::string& name) { return test::read_file(std::string(IPT_GOLDEN) + "/" + name); }

Bytes golden_bytes(const std::string& name) { return bytes_of(golden(name)); }

class ThrowingModel : public MockModel {
 public:
  ThrowingModel() : MockModel(LabelSpace({"a", "b"}), MockMode::uniform) {}
  InferResponse infer(const InferRequest&) const override { throw std::runtime_error("weights file missing: /m/x.pt"); }
};

// Runs a one-shot TCP server for `handler` and returns a connected client spec.
struct TcpServer {
  explicit TcpServer(const ModelHandler& handler, std::size_t connections = 1) {
    std::promise<std::uint16_t> bound;
    auto port_future = bound.get_future();
    thread = std::thread([&handler, connections, p = std::move(bound)]() mutable {
      serve_tcp(0, handler, connections, [&p](std::uint16_t port) { p.set_value(port); });
    });
    spec = EndpointSpec::parse("tcp:127.0.0.1:" + std::to_string(port_future.get()));
  }
  ~TcpServer() { thread.join(); }
  std::thread thread;
  EndpointSpec spec;
};

Video small_video(const std::string& id) {
  std::mt19937_64 rng(9);
  return test::random_video(rng, id, 3, 10, 6);
}

}  // namespace

TEST(Framing, EmptyHeaderIs18Bytes) {
  const auto b = encode_message(json::object());
  ASSERT_EQ(b.size(), 18u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "IPT1");
  EXPECT_EQ(b, frame("{}"));
}

TEST(Framing, MatchesHandAssembledLayout) {
  const Bytes payload = {1, 2, 3, 0, 255};
  EXPECT_EQ(encode_message({{"msg", "x"}}, payload), frame(R"({"msg":"x"})", payload));
  const auto m = decode_message(frame(R"({"k":[1,2]})", payload));
  EXPECT_EQ(m.header, json({{"k", {1, 2}}}));
  EXPECT_EQ(m.payload, payload);
}

TEST(Framing, RoundTrip1000) {
  std::mt19937_64 rng(1234);
  Bytes stream;
  std::vector<Message> sent;
  for (int i = 0; i < 1000; ++i) {
    json header = json::object();
    for (auto n = rng() % 6; n > 0; --n) header[random_string(rng)] = random_value(rng, 0);
    Bytes payload(rng() % 3 == 0 ? 0 : rng() % 4096);
    for (auto& p : payload) p = static_cast<std::uint8_t>(rng());
    const auto b = encode_message(header, payload);
    std::size_t used = 0;
    const auto m = decode_message(b, &used);
    ASSERT_EQ(used, b.size());
    ASSERT_EQ(m.header, header) << header.dump();
    ASSERT_EQ(m.payload, payload);
    stream.insert(stream.end(), b.begin(), b.end());
    sent.push_back({header, payload});
  }
  TrickleSource src(stream);
  for (const auto& want : sent) {
    const auto got = read_message(src);
    ASSERT_TRUE(got);
    ASSERT_EQ(*got, want);
  }
  EXPECT_FALSE(read_message(src));
}

TEST(Framing, BadMagic) {
  auto b = encode_message({{"msg", "hello"}});
  b[0] = 'X';
  EXPECT_EQ(decode_error(b), ProtocolError::Code::bad_magic);
}

TEST(Framing, TruncationNamesExpectedAndReceived) {
  const Bytes payload(10, 7);
  auto b = frame("{}", payload);
  b.resize(b.size() - 7);
  std::string what;
  EXPECT_EQ(decode_error(b, &what), ProtocolError::Code::truncated);
  EXPECT_NE(what.find("expected 10 bytes, received 3"), std::string::npos) << what;

  const auto full = frame(R"({"msg":"hello"})");
  for (std::size_t n = 1; n < full.size(); ++n) {
    EXPECT_EQ(decode_error(Bytes(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n))),
              ProtocolError::Code::truncated)
        << n;
  }
}

TEST(Framing, Oversize) {
  Bytes b = bytes_of("IPT1");
  const std::uint32_t big = (16u << 20) + 1;
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(big >> (8 * i)));
  EXPECT_EQ(decode_error(b), ProtocolError::Code::oversize);
  // At the limit the length is accepted and the missing bytes are reported instead.
  b[4 + 0] = 0;
  b[4 + 1] = 0;
  b[4 + 2] = 0;
  b[4 + 3] = 1;
  EXPECT_EQ(decode_error(b), ProtocolError::Code::truncated);

  EXPECT_EQ(decode_error(frame("{}", {}, (std::uint64_t{1} << 30) + 1)), ProtocolError::Code::oversize);
  EXPECT_EQ(decode_error(frame("{}", {}, ~std::uint64_t{0})), ProtocolError::Code::oversize);
  EXPECT_EQ(decode_error(frame("{}", {}, std::uint64_t{1} << 30)), ProtocolError::Code::truncated);

  EXPECT_THROW(encode_message({{"s", std::string((16u << 20) + 1, 'a')}}), ProtocolError);
  const std::uint8_t one = 0;
  try {
    encode_message(json::object(), std::span<const std::uint8_t>(&one, (std::size_t{1} << 30) + 1));
    ADD_FAILURE();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ProtocolError::Code::oversize);
  }
}

TEST(Framing, InvalidUtf8AndJson) {
  EXPECT_EQ(decode_error(frame("{\"a\":\"\xff\"}")), ProtocolError::Code::invalid_utf8);
  EXPECT_EQ(decode_error(frame("{\"a\":\"\xc0\xaf\"}")), ProtocolError::Code::invalid_utf8);      // overlong
  EXPECT_EQ(decode_error(frame("{\"a\":\"\xed\xa0\x80\"}")), ProtocolError::Code::invalid_utf8);  // surrogate
  EXPECT_EQ(decode_error(frame("{\"a\":")), ProtocolError::Code::invalid_json);
  EXPECT_EQ(decode_error(frame("[1,2]")), ProtocolError::Code::invalid_json);
  EXPECT_EQ(decode_error(frame("")), ProtocolError::Code::invalid_json);
  EXPECT_NO_THROW(decode_message(frame("{\"a\":\"\xe6\xbc\xa2\xf0\x9f\x98\x80\"}")));
}

TEST(Framing, Utf8Validator) {
  EXPECT_TRUE(valid_utf8(bytes_of("")));
  EXPECT_TRUE(valid_utf8(bytes_of("\xf4\x8f\xbf\xbf")));
  EXPECT_FALSE(valid_utf8(bytes_of("\xf4\x90\x80\x80")));
  EXPECT_FALSE(valid_utf8(bytes_of("\xe6\xbc")));
  EXPECT_FALSE(valid_utf8(bytes_of("\x80")));
}

TEST(Framing, FuzzNeverCrashes) {
  std::mt19937_64 rng(77);
  std::vector<Bytes> seeds;
  for (const auto& [name, b] : golden_vectors()) seeds.push_back(b);
  seeds.push_back(frame(std::string(100000, '[')));
  seeds.push_back(frame("{\"a\":" + std::string(50000, '[') + std::string(50000, ']') + "}"));
  for (const auto& s : seeds) decode_totally(s);
  for (int i = 0; i < 20000; ++i) {
    Bytes b;
    if (i % 4 == 0) {
      b.resize(rng() % 64);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      if (rng() & 1) b.insert(b.begin(), {'I', 'P', 'T', '1'});
    } else {
      b = seeds[rng() % seeds.size()];
      for (auto n = 1 + rng() % 4; n > 0 && !b.empty(); --n) {
        const std::size_t at = rng() % b.size();
        switch (rng() % 4) {
          case 0: b[at] ^= static_cast<std::uint8_t>(1u << (rng() % 8)); break;
          case 1: b[at] = static_cast<std::uint8_t>(rng()); break;
          case 2: b.resize(at); break;
          default: b.insert(b.begin() + static_cast<std::ptrdiff_t>(at), static_cast<std::uint8_t>(rng()));
        }
      }
    }
    decode_totally(b);
    // The server must answer garbage with an error frame or nothing at all.
    const MockModel model(LabelSpace({"jump", "walk"}), MockMode::centroid);
    SpanSource in(b);
    VectorSink out;
    serve(in, out, model);
    std::size_t pos = 0;
    while (pos < out.data.size()) {
      std::size_t used = 0;
      ASSERT_NO_THROW(decode_message(std::span(out.data).subspan(pos), &used));
      pos += used;
    }
  }
}

TEST(Golden, FrozenBytesMatchEncoder) {
  const auto vectors = golden_vectors();
  EXPECT_EQ(vectors.size(), 6u);
  for (const auto& [name, bytes] : vectors) {
    EXPECT_EQ(golden(name), std::string(bytes.begin(), bytes.end())) << name;
  }
  EXPECT_EQ(golden_bytes("hello.bin"), frame(R"({"msg":"hello"})"));
  EXPECT_EQ(golden_bytes("hello_request.bin"), frame(R"({"msg":"hello","v":1})"));
  EXPECT_EQ(golden_vectors(), vectors);
}

TEST(Golden, MockAnswersGoldenRequests) {
  const MockModel model(LabelSpace({"jump", "walk"}), MockMode::uniform);
  auto request = golden_bytes("hello_request.bin");
  const auto infer = golden_bytes("infer_request.bin");
  request.insert(request.end(), infer.begin(), infer.end());
  SpanSource in(request);
  VectorSink out;
  EXPECT_TRUE(serve(in, out, model));
  auto want = golden_bytes("hello_response.bin");
  const auto resp = golden_bytes("infer_response.bin");
  want.insert(want.end(), resp.begin(), resp.end());
  EXPECT_EQ(out.data, want);

  // Scores payload: two f32 LE halves.
  const auto scores = decode_message(resp);
  EXPECT_EQ(scores.payload, (Bytes{0, 0, 0, 0x3f, 0, 0, 0, 0x3f}));
  EXPECT_EQ(decode_message(golden_bytes("error_response.bin")).header.at("msg"), "error");
}

TEST(Server, RejectsInferBeforeHello) {
  const MockModel model(LabelSpace({"jump", "walk"}), MockMode::uniform);
  const auto b = golden_bytes("infer_request.bin");
  SpanSource in(b);
  VectorSink out;
  EXPECT_FALSE(serve(in, out, model));
  const auto m = decode_message(out.data);
  EXPECT_EQ(m.header.at("msg"), "error");
  EXPECT_EQ(m.header.at("detail"), "infer before hello");
}

TEST(Server, RejectsWrongVersion) {
  const MockModel model(LabelSpace({"a"}), MockMode::uniform);
  const auto b = encode_message({{"msg", "hello"}, {"v", 2}});
  SpanSource in(b);
  VectorSink out;
  EXPECT_FALSE(serve(in, out, model));
  EXPECT_EQ(decode_message(out.data).header.at("msg"), "error");
}

TEST(Client, TcpRoundTrip) {
  const MockModel model(LabelSpace({"a", "b", "c"}), MockMode::centroid, 5);
  TcpServer server(model);
  auto client = ModelClient::connect(server.spec, Timeout{10'000});
  EXPECT_EQ(client.handshake().labels.labels(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(client.handshake().features, (std::vector<std::string>{"consensus", "pooled"}));
  EXPECT_EQ(client.handshake().name, "mock-centroid");
  const auto v = small_video("vid");
  const auto r1 = client.infer(InferRequest::from_video(v, {"consensus", "pooled"}));
  const auto r2 = client.infer(InferRequest::from_video(v, {"consensus", "pooled"}));
  EXPECT_EQ(r1, r2);
  EXPECT_EQ(r1.video_id, "vid");
  ASSERT_EQ(r1.scores.size(), 3u);
  EXPECT_EQ(r1.features.at("consensus").shape, std::vector<std::int64_t>{3});
  EXPECT_EQ(r1.features.at("pooled").shape, std::vector<std::int64_t>{static_cast<std::int64_t>(kPooledSize)});
  const auto direct = model.infer(InferRequest::from_video(v, {"consensus"}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r1.scores[i], static_cast<double>(static_cast<float>(direct.scores[i])));
}

TEST(Client, ExecRoundTrip) {
  const auto spec = EndpointSpec::parse(std::string("exec:") + IPT_PROBE + " mock --labels x,y --mode uniform");
  auto client = ModelClient::connect(spec, Timeout{10'000});
  const auto r = client.infer(InferRequest::from_video(small_video("e"), {"consensus"}));
  EXPECT_EQ(r.scores, (ScoreVector{0.5, 0.5}));
  EXPECT_EQ(r.features.at("consensus").values, (std::vector<float>{0.5f, 0.5f}));
}

TEST(Client, RemoteErrorRelayedVerbatim) {
  const ThrowingModel model;
  TcpServer server(model);
  auto client = ModelClient::connect(server.spec, Timeout{10'000});
  try {
    client.infer(InferRequest::from_video(small_video("v")));
    ADD_FAILURE();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ProtocolError::Code::remote);
    EXPECT_STREQ(e.what(), "weights file missing: /m/x.pt");
  }
}

TEST(Client, UnavailableFeatureIsAnError) {
  const MockModel model(LabelSpace({"a"}), MockMode::uniform);
  TcpServer server(model);
  auto client = ModelClient::connect(server.spec, Timeout{10'000});
  EXPECT_THROW(client.infer(InferRequest::from_video(small_video("v"), {"fc7"})), ProtocolError);
}

TEST(Client, Timeout) {
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(ModelClient::connect(EndpointSpec::parse("exec:sleep 3"), Timeout{200}), EndpointError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(3));
}

TEST(Client, ConnectionRefusedAndDeadChild) {
  EXPECT_THROW(ModelClient::connect(EndpointSpec::parse("tcp:127.0.0.1:1"), Timeout{1000}), EndpointError);
  EXPECT_THROW(ModelClient::connect(EndpointSpec::parse("exec:true"), Timeout{5000}), EndpointError);
}

TEST(Endpoint, Parse) {
  const auto t = EndpointSpec::parse("tcp:localhost:9000");
  EXPECT_EQ(t.transport, EndpointSpec::Transport::tcp);
  EXPECT_EQ(t.host, "localhost");
  EXPECT_EQ(t.port, 9000);
  EXPECT_EQ(t.to_string(), "tcp:localhost:9000");
  EXPECT_EQ(EndpointSpec::parse("exec:python -m m").command, "python -m m");
  for (const char* bad : {"", "tcp:", "tcp:host", "tcp:h:0", "tcp:h:70000", "tcp:h:1x", "exec:", "http://x"}) {
    EXPECT_THROW(EndpointSpec::parse(bad), ConfigError) << bad;
  }
}

TEST(Request, VideoRoundTrip) {
  const auto v = small_video("rt");
  const auto r = InferRequest::from_video(v);
  EXPECT_EQ(r.payload.size(), 10u * 6 * 3 * 3);
  EXPECT_EQ(r.to_video().frames(), v.frames());
  auto bad = r;
  bad.payload.pop_back();
  EXPECT_THROW(bad.to_video(), ProtocolError);
}
