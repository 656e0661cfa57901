#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace evk {

// Stable error taxonomy; mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  Io = 1,
  Parse = 2,
  Validation = 3,
  Conflict = 4,
  InvalidArgument = 5,
  InsufficientData = 6,
  InsufficientClusters = 7,
  Degenerate = 8,
  Infeasible = 9,
  Internal = 10,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace evk
