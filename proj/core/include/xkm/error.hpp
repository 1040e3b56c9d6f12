#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xkm {

enum class ErrorCode {
  EmptyInput,
  DimensionError,
  TreeInvariantViolation,
  InvalidParameter,
  InvalidNode,
  TerminationCapExceeded,
  DegenerateInstance,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures onto exit statuses without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xkm
