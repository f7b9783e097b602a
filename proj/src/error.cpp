#include "qfolio/error.hpp"

namespace qfolio {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingTicker: return "MissingTicker";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoCommonDates: return "NoCommonDates";
    case ErrorCode::SingleObservation: return "SingleObservation";
    case ErrorCode::BudgetOutOfRange: return "BudgetOutOfRange";
    case ErrorCode::NonPositivePenalty: return "NonPositivePenalty";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::UnboundParameter: return "UnboundParameter";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroShots: return "ZeroShots";
    case ErrorCode::ParamLengthMismatch: return "ParamLengthMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MissingReturn: return "MissingReturn";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingTicker:
    case ErrorCode::MalformedRow:
    case ErrorCode::EmptyWindow:
    case ErrorCode::NoCommonDates:
    case ErrorCode::SingleObservation:
    case ErrorCode::MissingReturn:
    case ErrorCode::Io:
      return ErrorKind::Data;
    case ErrorCode::BudgetOutOfRange:
    case ErrorCode::NonPositivePenalty:
    case ErrorCode::TooManyQubits:
    case ErrorCode::InvalidConfig:
    case ErrorCode::TooLarge:
      return ErrorKind::Config;
    default:
      return ErrorKind::Internal;
  }
}

}  // namespace qfolio
