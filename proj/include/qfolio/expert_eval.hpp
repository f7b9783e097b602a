#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfolio/ansatz.hpp"
#include "qfolio/date.hpp"
#include "qfolio/market_data.hpp"
#include "qfolio/oracle.hpp"
#include "qfolio/qubo.hpp"
#include "qfolio/vqa.hpp"

namespace qfolio {

/// Where a portfolio came from: an optimisation run or a user-specified set.
struct PortfolioSource {
  bool manual = true;
  AnsatzFamily family = AnsatzFamily::QAOA;
  std::size_t depth = 0;
  std::uint64_t seed = 0;

  static PortfolioSource run(AnsatzFamily f, std::size_t depth, std::uint64_t seed) { return {false, f, depth, seed}; }
  std::string label() const;  // "MANUAL" or "EFFICIENT_SU2/d2/s0"
  friend bool operator==(const PortfolioSource&, const PortfolioSource&) = default;
};

/// Selected assets, kept in universe order.
struct Portfolio {
  std::vector<std::string> tickers;
  PortfolioSource source;
  Bitstring selection;

  /// Throws DimensionMismatch on an empty selection or a width that differs from the universe.
  static Portfolio from_selection(std::span<const std::string> universe, const Bitstring& bits,
                                  PortfolioSource source = {});
  /// Throws MissingTicker for symbols outside the universe, DimensionMismatch for an empty set.
  static Portfolio from_tickers(std::span<const std::string> universe, std::span<const std::string> tickers,
                                PortfolioSource source = {});

  std::string joined() const;  // "GOOG, MSFT"
};

using ReturnMap = std::map<std::string, double, std::less<>>;

/// Unweighted mean of the constituents' percent returns. Throws MissingReturn.
double portfolio_return(const Portfolio& portfolio, const ReturnMap& window_returns);

struct AssetReturn {
  std::string ticker;
  double start_price = 0.0;
  double end_price = 0.0;
  double return_pct = 0.0;
};

struct PortfolioReturn {
  Portfolio portfolio;
  double average_pct = 0.0;
};

struct BacktestReport {
  DateRange window;
  std::vector<AssetReturn> per_asset;            // order of the supplied price series
  std::vector<PortfolioReturn> per_portfolio;    // input order
  std::vector<std::size_t> ranking;              // indices into per_portfolio, best first

  ReturnMap returns() const;
};

/// Average return descending, then joined ticker string ascending, then source label.
bool ranks_before(const PortfolioReturn& a, const PortfolioReturn& b);

/// Throws MissingTicker when a portfolio references a series that was not
/// supplied, and EmptyWindow / SingleObservation when a series does not cover
/// the window.
BacktestReport backtest(std::span<const Portfolio> portfolios, std::span<const PriceSeries> prices,
                        const DateRange& window);

struct FeasibilityOptions {
  /// Trailing (estimation window) percent returns used for negative-trend flags.
  ReturnMap trailing_returns;
  double negative_trend_threshold = -10.0;
};

struct RunAssessment {
  PortfolioSource source;
  Bitstring top_bitstring;
  std::optional<Portfolio> portfolio;  // nullopt for the empty selection
  bool matches_ground_truth = false;
  std::optional<double> future_return;
  std::size_t rank = 0;        // 1-based among all subsets of the same size; 0 if not ranked
  std::size_t rank_pool = 0;   // C(n, |portfolio|)
  std::vector<std::string> negative_trend_assets;
};

struct FeasibilitySummary {
  std::vector<RunAssessment> runs;
  std::vector<PortfolioReturn> ranking;        // distinct report portfolios, best first
  std::vector<PortfolioReturn> positive;       // distinct report portfolios with average > 0
  std::optional<Bitstring> oracle_feasible_best;
  double negative_trend_threshold = -10.0;
};

/// `universe` is the ticker order the bitstrings are aligned to.
FeasibilitySummary feasibility_summary(const BacktestReport& report, const OracleResult& oracle,
                                       std::span<const RunResult> runs, std::span<const std::string> universe,
                                       const FeasibilityOptions& options = {});

/// 1-based rank of `selection` among all equal-size subsets of `universe`,
/// ordered as in `ranks_before`. Throws MissingReturn if a return is absent.
std::size_t subset_rank(std::span<const std::string> universe, const Bitstring& selection, const ReturnMap& returns);

std::string to_markdown(const BacktestReport& report, const FeasibilitySummary* summary = nullptr);
nlohmann::json to_json(const BacktestReport& report);
nlohmann::json to_json(const FeasibilitySummary& summary);

}  // namespace qfolio
