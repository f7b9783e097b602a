#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qfolio/date.hpp"

namespace qfolio {

struct Observation {
  Date date;
  double price = 0.0;  // > 0
};

/// Dated adjusted closes for one ticker, strictly increasing in date.
struct PriceSeries {
  std::string ticker;
  std::vector<Observation> observations;

  /// Copy restricted to the inclusive window.
  PriceSeries restricted_to(const DateRange& window) const;
};

/// Dense row-major square matrix. Small n only (asset universes, QUBOs).
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Label of the estimator used to build mu and sigma. Stored with every
/// snapshot so other conventions can be added later without ambiguity.
inline constexpr const char* kReturnConvention = "daily-simple-returns/sample-mean/sample-cov-n-1";

struct MarketSnapshot {
  std::vector<std::string> tickers;
  std::vector<Date> dates;                         // common dates used, ascending
  std::vector<std::vector<double>> daily_returns;  // [asset][t], t = 1..dates-1
  std::vector<double> mu;
  Matrix sigma;
  std::string convention = kReturnConvention;

  std::size_t size() const noexcept { return tickers.size(); }
};

/// Reads a long-format `date,ticker,adj_close` CSV and returns one series per
/// requested ticker (in request order), restricted to `window`.
///
/// Throws MissingTicker if a symbol is absent from the file, MalformedRowError
/// for unparseable rows or duplicate (date, ticker) pairs, EmptyWindow if a
/// ticker has no rows inside the window, and SingleObservation if it has one.
std::vector<PriceSeries> load_prices(const std::filesystem::path& path,
                                     std::span<const std::string> tickers,
                                     const DateRange& window);

/// Same as load_prices but parses CSV text already in memory.
std::vector<PriceSeries> parse_prices(std::string_view csv_text,
                                      std::span<const std::string> tickers,
                                      const DateRange& window);

/// mu and sigma from daily simple returns over the dates shared by all series.
MarketSnapshot compute_snapshot(std::span<const PriceSeries> series);

/// Percent change from first to last observation.
double period_return(const PriceSeries& series);

}  // namespace qfolio
