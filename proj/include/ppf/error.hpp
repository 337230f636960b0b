#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppf {

enum class ErrorCode {
  NotUnstable,
  NoStablePlateau,
  DegenerateXi,
  PoleAtUnitP,
  NewtonDivergence,
  BranchJump,
  PoleAtUnitLambda,
  NonDecaying,
  NoOscillation,
  WindowExceeded,
  OnBranchCut,
  EmptyContour,
  SingularSystem,
  Divergence,
  InvalidConfig,
  NoFront,
  InsufficientSamples,
  TooFewCrossings,
  WindowOutOfDomain,
  StiffnessFailure,
  PlateauTooNarrow,
  MissingInput,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// (the CLI in particular) map failures to exit codes without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ppf
