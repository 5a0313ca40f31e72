#include "advland/error.hpp"

namespace advland {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotSmooth: return "NotSmooth";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::UnsupportedPower: return "UnsupportedPower";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::UnknownBound: return "UnknownBound";
    case ErrorCode::InvalidTrials: return "InvalidTrials";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace advland
