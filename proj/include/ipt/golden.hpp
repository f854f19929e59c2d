#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ipt {

/// Canonical protocol exchanges, keyed by file name. Responses come from the
/// uniform mock over labels ["jump","walk"].
///   hello.bin            {"msg":"hello"}, empty payload
///   hello_request.bin    client handshake
///   hello_response.bin   mock handshake reply
///   infer_request.bin    2x2, 2-frame video "golden", want ["consensus"]
///   infer_response.bin   scores then the consensus feature
///   error_response.bin   reply to an unknown message type
std::map<std::string, std::vector<std::uint8_t>> golden_vectors();

}  // namespace ipt
