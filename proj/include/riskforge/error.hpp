#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskforge {

enum class ErrorCode {
  InvalidArgument,
  MissingInput,
  Io,
  Format,
  MissingColumn,
  TypeError,
  EmptyDataset,
  AllMissingColumn,
  DegenerateSplit,
  UnknownFeature,
  NotCategorical,
  UnknownColumn,
  TooFewRows,
  SingleClass,
  SchemaMismatch,
  NonFiniteLoss,
  VersionMismatch,
  FingerprintMismatch,
  LengthMismatch,
  TooManyFeatures,
  UnsupportedModel,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::AllMissingColumn: return "AllMissingColumn";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::NotCategorical: return "NotCategorical";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooManyFeatures: return "TooManyFeatures";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
  }
  return "Unknown";
}

// Process exit status for a failure of the given class: 10 + the code's
// position in ErrorCode. 1 is reserved for unexpected failures and 2 for
// command-line usage errors.
inline int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

// Every failure raised by the library carries one of the codes above; the
// CLI maps codes to process exit statuses and the service to HTTP statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riskforge
