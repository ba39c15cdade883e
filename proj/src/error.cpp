#include "tilebn/error.hpp"

namespace tilebn {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MissingCpd: return "MissingCpd";
    case ErrorCode::RowNotNormalized: return "RowNotNormalized";
    case ErrorCode::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorCode::InvalidVariable: return "InvalidVariable";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::DuplicateFeatureName: return "DuplicateFeatureName";
    case ErrorCode::TargetObserved: return "TargetObserved";
    case ErrorCode::ZeroProbabilityEvidence: return "ZeroProbabilityEvidence";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::InvalidEvidence: return "InvalidEvidence";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DegenerateRow: return "DegenerateRow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownStateLabel: return "UnknownStateLabel";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::MissingRequiredNode: return "MissingRequiredNode";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string("[") + error_code_name(code) + "] " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tilebn
