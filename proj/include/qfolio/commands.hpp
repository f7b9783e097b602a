#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qfolio/date.hpp"
#include "qfolio/vqa.hpp"

namespace qfolio::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

struct OptimizeOptions {
  std::filesystem::path manifest;
  std::optional<std::size_t> jobs;
  std::optional<CostMode> cost_mode;
  std::optional<std::uint64_t> shots;
  std::optional<std::filesystem::path> out;
  std::int64_t seed_offset = 0;
  bool dump_config = false;
  bool full_trace = false;
};

struct OracleOptions {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> out;
};

struct BacktestOptions {
  std::filesystem::path run_dir;
  std::optional<DateRange> future_window;
  std::vector<std::vector<std::string>> manual;
  std::optional<std::filesystem::path> out;
  double negative_trend_threshold = -10.0;
};

struct ReportOptions {
  std::filesystem::path run_dir;
};

/// Each command writes its artifacts, prints a human summary to `out`, reports
/// failures on `err`, and returns a process exit code.
int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err);
int cmd_backtest(const BacktestOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

/// Parses QFOLIO_SEED_OFFSET; nullopt when the text is not an integer.
std::optional<std::int64_t> parse_seed_offset(const char* text);

/// Splits "GOOG,MSFT" into tickers, trimming spaces.
std::vector<std::string> split_tickers(std::string_view text);

/// Hex SHA-256 of a file's bytes. Throws Io.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace qfolio::cli
