#pragma once

#include <stdexcept>
#include <string>

namespace mpsent {

enum class ErrorCode {
  InvalidArgument,
  NoStableRoot,
  Indeterminate,
  SingularSystem,
  InsufficientData,
  SingularRegressors,
  StabilityExhausted,
  EmptyIdentifiedSet,
  AllZeroWeights,
  RankDeficient,
  WeightingSingular,
  EmptyPeriod,
  EmptyBaseWindow,
  DegenerateData,
  UnstableDgp,
  ExplosivePath,
  ParseError,
  DuplicateDate,
  NonNumericCell,
  ZeroVariance,
  Io,
  Usage,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoStableRoot: return "NoStableRoot";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SingularRegressors: return "SingularRegressors";
    case ErrorCode::StabilityExhausted: return "StabilityExhausted";
    case ErrorCode::EmptyIdentifiedSet: return "EmptyIdentifiedSet";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::WeightingSingular: return "WeightingSingular";
    case ErrorCode::EmptyPeriod: return "EmptyPeriod";
    case ErrorCode::EmptyBaseWindow: return "EmptyBaseWindow";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::UnstableDgp: return "UnstableDgp";
    case ErrorCode::ExplosivePath: return "ExplosivePath";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace mpsent
