#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crossdyn {

enum class ErrorCode {
  InvalidArgument,
  DegenerateData,
  NoAttractorFound,
  EmptyRow,
  NoConvergence,
  NegativeRadicand,
  EmptyCohort,
  DegenerateScale,
  ParseError,
  SchemaMismatch,
  IoError,
  BoundaryOptimum,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crossdyn
