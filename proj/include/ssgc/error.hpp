#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssgc {

enum class ErrorCode {
  InvalidProblem,
  NonConvergence,
  SingularInnovations,
  EigenFailure,
  DimensionMismatch,
  SingularSolve,
  InvalidPartition,
  ReducedNotMinimumPhase,
  NegativeCausality,
  RankDeficient,
  InsufficientData,
  InvalidModel,
  IllConditioned,
  UnstableEstimate,
  TooFewValues,
  TooFewSamples,
  InvalidF,
  InvalidConfig,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures carry a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ssgc
