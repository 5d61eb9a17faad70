#pragma once

#include <stdexcept>
#include <string>

namespace absorbing {

enum class ErrorCode {
  NonPositivePayoff,
  ProbabilityOutOfRange,
  MissingPayoff,
  InvalidGame,
  InvalidProfile,
  NonAbsorbingProfile,
  AbsorbingProfile,
  SupportNotNonabsorbing,
  TooManyPlayers,
  SearchBudgetExceeded,
  WitnessNotFound,
  NashNotFound,
  InvalidWitness,
  RectangularComponentFound,
  OrbitBudgetExceeded,
  HorizonOverflow,
  GenerationBudgetExceeded,
  InvalidArgument,
  Io,
};

const char* error_name(ErrorCode code);

// Exit status the CLI reports for an error: 2 precondition, 3 search, 4 I/O.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace absorbing
