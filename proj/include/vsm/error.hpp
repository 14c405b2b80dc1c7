#pragma once

#include <stdexcept>
#include <string>

namespace vsm {

enum class ErrorCode {
  Unreachable,
  LegSingular,
  RankDeficient,
  OutOfRange,
  TorqueInfeasible,
  Infeasible,
  DegenerateStiffness,
  EmptyWorkspace,
  DimensionMismatch,
  UnsupportedLegCount,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Exception carrying one of the library's error kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vsm
