#include "handpose/errors.hpp"

namespace handpose {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDof: return "UnknownDof";
    case ErrorCode::DuplicateDof: return "DuplicateDof";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::IllConditionedGram: return "IllConditionedGram";
    case ErrorCode::SingularPrior: return "SingularPrior";
    case ErrorCode::NotSelectionMatrix: return "NotSelectionMatrix";
    case ErrorCode::SingularMeasuredBlock: return "SingularMeasuredBlock";
    case ErrorCode::IllConditionedInnovation: return "IllConditionedInnovation";
    case ErrorCode::SingularNoise: return "SingularNoise";
    case ErrorCode::RankDeficientPoses: return "RankDeficientPoses";
    case ErrorCode::InsufficientWindowSamples: return "InsufficientWindowSamples";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooFewDistinct: return "TooFewDistinct";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IncompleteReport: return "IncompleteReport";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace handpose
