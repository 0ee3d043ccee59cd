#include "ssgc/error.hpp"

namespace ssgc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularInnovations: return "SingularInnovations";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSolve: return "SingularSolve";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::ReducedNotMinimumPhase: return "ReducedNotMinimumPhase";
    case ErrorCode::NegativeCausality: return "NegativeCausality";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::UnstableEstimate: return "UnstableEstimate";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidF: return "InvalidF";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace ssgc
