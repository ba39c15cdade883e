#pragma once

#include <stdexcept>
#include <string>

namespace tilebn {

// Every failure mode the library reports. Codes are stable identifiers;
// messages carry the specifics (variable names, row indices, file positions).
enum class ErrorCode {
  // network construction and validation
  CycleDetected,
  MissingCpd,
  RowNotNormalized,
  CardinalityMismatch,
  InvalidVariable,
  InvalidStructure,
  DuplicateFeatureName,
  // inference
  TargetObserved,
  ZeroProbabilityEvidence,
  StateSpaceTooLarge,
  InvalidEvidence,
  // learning and data ingestion
  SchemaMismatch,
  EmptyDataset,
  DegenerateRow,
  ParseError,
  UnknownStateLabel,
  MissingColumn,
  // refinement and simulation
  UnknownFeature,
  ProfileMismatch,
  MissingRequiredNode,
  // metrics and experiments
  DegenerateLabels,
  LengthMismatch,
  TooFewSamples,
  ConfigInvalid,
  // filesystem
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace tilebn
