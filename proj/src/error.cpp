#include "vsm/error.hpp"

namespace vsm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::LegSingular: return "LegSingular";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TorqueInfeasible: return "TorqueInfeasible";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DegenerateStiffness: return "DegenerateStiffness";
    case ErrorCode::EmptyWorkspace: return "EmptyWorkspace";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedLegCount: return "UnsupportedLegCount";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace vsm
