#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipt {

// Every failure surfaced by the toolkit falls into one of these buckets; the
// CLI maps them onto exit codes 2, 3 and 4.
enum class ErrorKind { config, endpoint, data };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class EndpointError : public Error {
 public:
  explicit EndpointError(const std::string& what) : Error(ErrorKind::endpoint, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// BVH syntax or consistency failure at a 1-based source line.
class BvhParseError : public DataError {
 public:
  enum class Code { lexical, unbalanced_braces, channel_count, frame_count, structure };

  BvhParseError(Code code, std::size_t line, const std::string& detail)
      : DataError("bvh:" + std::to_string(line) + ": " + detail), code_(code), line_(line) {}

  Code code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Code code_;
  std::size_t line_;
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::endpoint:
      return 3;
    case ErrorKind::data:
      return 4;
  }
  return 1;
}

}  // namespace ipt
