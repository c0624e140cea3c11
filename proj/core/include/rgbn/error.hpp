#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgbn {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  DecodeError,
  IoError,
  NonPositiveInput,
  UnsupportedChannelCount,
  OutOfRange,
  DegenerateDistribution,
  EmptyInput,
  SingularSystem,
  DegenerateCamera,
  RegionOutOfBounds,
  SizeMismatch,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rgbn
