#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace advland {

enum class ErrorCode {
  InvalidArgument,
  InvalidDims,
  DimMismatch,
  NotSmooth,
  Unsupported,
  UnsupportedPower,
  ZeroGradient,
  DomainError,
  PreconditionViolated,
  UnknownBound,
  InvalidTrials,
  InvalidConfig,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace advland
