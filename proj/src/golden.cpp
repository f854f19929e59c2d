#include "ipt/golden.hpp"

#include "ipt/mock_model.hpp"
#include "ipt/protocol.hpp"

namespace ipt {
namespace {

std::vector<std::uint8_t> reply(const MockModel& model, const std::vector<std::uint8_t>& request) {
  SpanSource in(request);
  VectorSink out;
  serve(in, out, model);
  return out.data;
}

std::vector<std::uint8_t> concat(std::vector<std::uint8_t> a, const std::vector<std::uint8_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::map<std::string, std::vector<std::uint8_t>> golden_vectors() {
  const MockModel model(LabelSpace({"jump", "walk"}), MockMode::uniform);
  std::map<std::string, std::vector<std::uint8_t>> out;
  out["hello.bin"] = encode_message({{"msg", "hello"}});
  out["hello_request.bin"] = encode_message({{"msg", "hello"}, {"v", kProtocolVersion}});
  out["hello_response.bin"] = reply(model, out["hello_request.bin"]);

  std::vector<std::uint8_t> pixels(2 * 2 * 3 * 2);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<std::uint8_t>(i * 10);
  out["infer_request.bin"] = encode_message({{"msg", "infer"},
                                             {"v", kProtocolVersion},
                                             {"id", "golden"},
                                             {"w", 2},
                                             {"h", 2},
                                             {"n", 2},
                                             {"fps", 30.0},
                                             {"want", {"consensus"}}},
                                            pixels);
  const auto both = reply(model, concat(out["hello_request.bin"], out["infer_request.bin"]));
  out["infer_response.bin"].assign(both.begin() + static_cast<std::ptrdiff_t>(out["hello_response.bin"].size()),
                                   both.end());
  out["error_response.bin"] = reply(model, encode_message({{"msg", "bogus"}, {"v", kProtocolVersion}}));
  return out;
}

}  // namespace ipt
