#pragma once

#include <stdexcept>
#include <string>

namespace handpose {

// Machine-parsable failure codes. The CLI prints them as `error[<code>]: <detail>`.
enum class ErrorCode {
  UnknownDof,
  DuplicateDof,
  InsufficientSamples,
  NonFiniteInput,
  SingularCovariance,
  RankDeficient,
  IllConditionedGram,
  SingularPrior,
  NotSelectionMatrix,
  SingularMeasuredBlock,
  IllConditionedInnovation,
  SingularNoise,
  RankDeficientPoses,
  InsufficientWindowSamples,
  TooFewSamples,
  TooFewDistinct,
  DimensionMismatch,
  IncompleteReport,
  ParseError,
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

}  // namespace handpose
