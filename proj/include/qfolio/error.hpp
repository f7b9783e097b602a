#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfolio {

enum class ErrorCode {
  // market data
  MissingTicker,
  MalformedRow,
  EmptyWindow,
  NoCommonDates,
  SingleObservation,
  // qubo
  BudgetOutOfRange,
  NonPositivePenalty,
  LengthMismatch,
  // simulator
  TooManyQubits,
  UnboundParameter,
  IndexOutOfRange,
  DimensionMismatch,
  ZeroShots,
  // engine / oracle / evaluation
  ParamLengthMismatch,
  InvalidConfig,
  TooLarge,
  MissingReturn,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Error category used by the CLI to choose an exit code.
enum class ErrorKind { Config, Data, Internal };

ErrorKind kind_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the CSV loader; carries the 1-based line number of the bad row.
class MalformedRowError : public Error {
 public:
  MalformedRowError(std::size_t line, const std::string& what)
      : Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qfolio
