#include "ppf/error.hpp"

namespace ppf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotUnstable: return "NotUnstable";
    case ErrorCode::NoStablePlateau: return "NoStablePlateau";
    case ErrorCode::DegenerateXi: return "DegenerateXi";
    case ErrorCode::PoleAtUnitP: return "PoleAtUnitP";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::BranchJump: return "BranchJump";
    case ErrorCode::PoleAtUnitLambda: return "PoleAtUnitLambda";
    case ErrorCode::NonDecaying: return "NonDecaying";
    case ErrorCode::NoOscillation: return "NoOscillation";
    case ErrorCode::WindowExceeded: return "WindowExceeded";
    case ErrorCode::OnBranchCut: return "OnBranchCut";
    case ErrorCode::EmptyContour: return "EmptyContour";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NoFront: return "NoFront";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::TooFewCrossings: return "TooFewCrossings";
    case ErrorCode::WindowOutOfDomain: return "WindowOutOfDomain";
    case ErrorCode::StiffnessFailure: return "StiffnessFailure";
    case ErrorCode::PlateauTooNarrow: return "PlateauTooNarrow";
    case ErrorCode::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

}  // namespace ppf
