#include "absorbing/errors.hpp"

namespace absorbing {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositivePayoff: return "NonPositivePayoff";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::MissingPayoff: return "MissingPayoff";
    case ErrorCode::InvalidGame: return "InvalidGame";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::NonAbsorbingProfile: return "NonAbsorbingProfile";
    case ErrorCode::AbsorbingProfile: return "AbsorbingProfile";
    case ErrorCode::SupportNotNonabsorbing: return "SupportNotNonabsorbing";
    case ErrorCode::TooManyPlayers: return "TooManyPlayers";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::WitnessNotFound: return "WitnessNotFound";
    case ErrorCode::NashNotFound: return "NashNotFound";
    case ErrorCode::InvalidWitness: return "InvalidWitness";
    case ErrorCode::RectangularComponentFound: return "RectangularComponentFound";
    case ErrorCode::OrbitBudgetExceeded: return "OrbitBudgetExceeded";
    case ErrorCode::HorizonOverflow: return "HorizonOverflow";
    case ErrorCode::GenerationBudgetExceeded: return "GenerationBudgetExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return 4;
    case ErrorCode::SearchBudgetExceeded:
    case ErrorCode::WitnessNotFound:
    case ErrorCode::NashNotFound:
    case ErrorCode::OrbitBudgetExceeded:
    case ErrorCode::GenerationBudgetExceeded:
    case ErrorCode::InvalidWitness:
    case ErrorCode::HorizonOverflow:
      return 3;
    default:
      return 2;
  }
}

}  // namespace absorbing
