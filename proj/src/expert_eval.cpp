#include "qfolio/expert_eval.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "qfolio/error.hpp"

namespace qfolio {

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // "-0.00" reads oddly in a table
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string price(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Next integer with the same popcount (Gosper).
std::uint64_t next_combination(std::uint64_t x) {
  const std::uint64_t c = x & (~x + 1);
  const std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

double subset_average(std::span<const std::string> universe, std::uint64_t bits, const ReturnMap& returns) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (!((bits >> i) & 1U)) continue;
    const auto it = returns.find(universe[i]);
    if (it == returns.end()) throw Error(ErrorCode::MissingReturn, "no return for " + universe[i]);
    acc += it->second;
    ++count;
  }
  return acc / static_cast<double>(count);
}

std::string joined_subset(std::span<const std::string> universe, std::uint64_t bits) {
  std::string out;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (!((bits >> i) & 1U)) continue;
    if (!out.empty()) out += ", ";
    out += universe[i];
  }
  return out;
}

}  // namespace

std::string PortfolioSource::label() const {
  if (manual) return "MANUAL";
  return std::string(to_string(family)) + "/d" + std::to_string(depth) + "/s" + std::to_string(seed);
}

Portfolio Portfolio::from_selection(std::span<const std::string> universe, const Bitstring& bits,
                                    PortfolioSource source) {
  if (bits.size() != universe.size())
    throw Error(ErrorCode::DimensionMismatch, "selection width differs from the universe");
  if (bits.popcount() == 0) throw Error(ErrorCode::DimensionMismatch, "empty portfolio");
  Portfolio p;
  p.source = source;
  p.selection = bits;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (bits[i]) p.tickers.push_back(universe[i]);
  return p;
}

Portfolio Portfolio::from_tickers(std::span<const std::string> universe, std::span<const std::string> tickers,
                                  PortfolioSource source) {
  std::uint64_t bits = 0;
  for (const auto& t : tickers) {
    const auto it = std::find(universe.begin(), universe.end(), t);
    if (it == universe.end()) throw Error(ErrorCode::MissingTicker, t + " is not in the universe");
    bits |= std::uint64_t{1} << (it - universe.begin());
  }
  return from_selection(universe, Bitstring(universe.size(), bits), source);
}

std::string Portfolio::joined() const {
  std::string out;
  for (const auto& t : tickers) {
    if (!out.empty()) out += ", ";
    out += t;
  }
  return out;
}

double portfolio_return(const Portfolio& portfolio, const ReturnMap& window_returns) {
  if (portfolio.tickers.empty()) throw Error(ErrorCode::DimensionMismatch, "empty portfolio");
  double acc = 0.0;
  for (const auto& t : portfolio.tickers) {
    const auto it = window_returns.find(t);
    if (it == window_returns.end()) throw Error(ErrorCode::MissingReturn, "no return for " + t);
    acc += it->second;
  }
  return acc / static_cast<double>(portfolio.tickers.size());
}

ReturnMap BacktestReport::returns() const {
  ReturnMap out;
  for (const auto& a : per_asset) out.emplace(a.ticker, a.return_pct);
  return out;
}

bool ranks_before(const PortfolioReturn& a, const PortfolioReturn& b) {
  if (a.average_pct != b.average_pct) return a.average_pct > b.average_pct;
  const auto ja = a.portfolio.joined(), jb = b.portfolio.joined();
  if (ja != jb) return ja < jb;
  return a.portfolio.source.label() < b.portfolio.source.label();
}

BacktestReport backtest(std::span<const Portfolio> portfolios, std::span<const PriceSeries> prices,
                        const DateRange& window) {
  BacktestReport report;
  report.window = window;
  for (const auto& series : prices) {
    const auto in_window = series.restricted_to(window);
    if (in_window.observations.empty())
      throw Error(ErrorCode::EmptyWindow, series.ticker + " has no prices in " + window.start.iso() + ":" +
                                              window.end.iso());
    report.per_asset.push_back({series.ticker, in_window.observations.front().price,
                                in_window.observations.back().price, period_return(in_window)});
  }

  const auto returns = report.returns();
  for (const auto& p : portfolios) {
    for (const auto& t : p.tickers)
      if (!returns.contains(t)) throw Error(ErrorCode::MissingTicker, "no price series for " + t);
    report.per_portfolio.push_back({p, portfolio_return(p, returns)});
  }

  report.ranking.resize(report.per_portfolio.size());
  std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(report.per_portfolio[a], report.per_portfolio[b]);
  });
  return report;
}

std::size_t subset_rank(std::span<const std::string> universe, const Bitstring& selection, const ReturnMap& returns) {
  const std::size_t n = universe.size();
  const auto k = selection.popcount();
  if (selection.size() != n || k == 0) throw Error(ErrorCode::DimensionMismatch, "selection does not fit universe");

  const double mine = subset_average(universe, selection.bits(), returns);
  const auto mine_joined = joined_subset(universe, selection.bits());
  std::size_t better = 0;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t x = (std::uint64_t{1} << k) - 1; x < limit; x = next_combination(x)) {
    if (x == selection.bits()) continue;
    const double avg = subset_average(universe, x, returns);
    if (avg > mine || (avg == mine && joined_subset(universe, x) < mine_joined)) ++better;
    if (k == n) break;
  }
  return better + 1;
}

FeasibilitySummary feasibility_summary(const BacktestReport& report, const OracleResult& oracle,
                                       std::span<const RunResult> runs, std::span<const std::string> universe,
                                       const FeasibilityOptions& options) {
  FeasibilitySummary out;
  out.negative_trend_threshold = options.negative_trend_threshold;
  if (oracle.feasible_best) out.oracle_feasible_best = oracle.feasible_best->bits;
  const auto returns = report.returns();

  const auto trend_flags = [&](const Portfolio& p) {
    std::vector<std::string> flagged;
    for (const auto& t : p.tickers) {
      const auto it = options.trailing_returns.find(t);
      if (it != options.trailing_returns.end() && it->second < options.negative_trend_threshold)
        flagged.push_back(t);
    }
    return flagged;
  };

  for (const auto& run : runs) {
    RunAssessment a;
    a.source = PortfolioSource::run(run.metadata.family, run.metadata.depth, run.metadata.seed);
    a.top_bitstring = run.top().bits;
    a.matches_ground_truth = out.oracle_feasible_best && a.top_bitstring == *out.oracle_feasible_best;
    if (a.top_bitstring.popcount() > 0) {
      a.portfolio = Portfolio::from_selection(universe, a.top_bitstring, a.source);
      a.future_return = portfolio_return(*a.portfolio, returns);
      a.rank = subset_rank(universe, a.top_bitstring, returns);
      a.rank_pool = 1;
      for (std::size_t i = 0; i < a.top_bitstring.popcount(); ++i)
        a.rank_pool = a.rank_pool * (universe.size() - i) / (i + 1);
      a.negative_trend_assets = trend_flags(*a.portfolio);
    }
    out.runs.push_back(std::move(a));
  }

  std::set<std::string> seen;
  for (const auto idx : report.ranking) {
    const auto& pr = report.per_portfolio[idx];
    if (!seen.insert(pr.portfolio.joined()).second) continue;
    out.ranking.push_back(pr);
    if (pr.average_pct > 0.0) out.positive.push_back(pr);
  }
  return out;
}

std::string to_markdown(const BacktestReport& report, const FeasibilitySummary* summary) {
  std::ostringstream md;
  md << "# Backtest " << report.window.start.iso() << " to " << report.window.end.iso() << "\n\n";
  md << "| Ticker | Start price | End price | Return (%) |\n|---|---:|---:|---:|\n";
  for (const auto& a : report.per_asset)
    md << "| " << a.ticker << " | " << price(a.start_price) << " | " << price(a.end_price) << " | "
       << pct(a.return_pct) << " |\n";

  md << "\n## Portfolios\n\n| Rank | Portfolio | Source | Return (%) |\n|---:|---|---|---:|\n";
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const auto& pr = report.per_portfolio[report.ranking[r]];
    md << "| " << r + 1 << " | " << pr.portfolio.joined() << " | " << pr.portfolio.source.label() << " | "
       << pct(pr.average_pct) << " |\n";
  }

  if (!summary) return md.str();

  md << "\n## Feasibility\n\n";
  if (summary->positive.empty()) {
    md << "No portfolio has a positive return over the window.\n";
  } else {
    md << (summary->positive.size() == 1 ? "Only positive-return portfolio: " : "Positive-return portfolios: ");
    for (std::size_t i = 0; i < summary->positive.size(); ++i)
      md << (i ? "; " : "") << "[" << summary->positive[i].portfolio.joined() << "] "
         << pct(summary->positive[i].average_pct) << "%";
    md << "\n";
  }

  if (!summary->runs.empty()) {
    md << "\n| Run | Top bitstring | Portfolio | Matches ground truth | Return (%) | Rank | Negative trend (< "
       << pct(summary->negative_trend_threshold) << "%) |\n|---|---|---|---|---:|---:|---|\n";
    for (const auto& a : summary->runs) {
      std::string flags;
      for (const auto& t : a.negative_trend_assets) flags += (flags.empty() ? "" : ", ") + t;
      md << "| " << a.source.label() << " | " << a.top_bitstring.str() << " | "
         << (a.portfolio ? a.portfolio->joined() : "(empty)") << " | " << (a.matches_ground_truth ? "true" : "false")
         << " | " << (a.future_return ? pct(*a.future_return) : "-") << " | "
         << (a.rank ? std::to_string(a.rank) + "/" + std::to_string(a.rank_pool) : "-") << " | " << flags << " |\n";
    }
  }
  return md.str();
}

namespace {

nlohmann::json portfolio_json(const PortfolioReturn& pr) {
  return {{"tickers", pr.portfolio.tickers},
          {"source", pr.portfolio.source.label()},
          {"selection", pr.portfolio.selection.str()},
          {"average_return_pct", pr.average_pct}};
}

}  // namespace

nlohmann::json to_json(const BacktestReport& report) {
  nlohmann::json assets = nlohmann::json::array();
  for (const auto& a : report.per_asset)
    assets.push_back({{"ticker", a.ticker},
                      {"start_price", a.start_price},
                      {"end_price", a.end_price},
                      {"return_pct", a.return_pct}});
  nlohmann::json portfolios = nlohmann::json::array();
  for (const auto& pr : report.per_portfolio) portfolios.push_back(portfolio_json(pr));
  return {{"window", {{"start", report.window.start.iso()}, {"end", report.window.end.iso()}}},
          {"per_asset", assets},
          {"per_portfolio", portfolios},
          {"ranking", report.ranking}};
}

nlohmann::json to_json(const FeasibilitySummary& summary) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& a : summary.runs) {
    nlohmann::json row{{"source", a.source.label()},
                       {"top_bitstring", a.top_bitstring.str()},
                       {"matches_ground_truth", a.matches_ground_truth},
                       {"negative_trend_assets", a.negative_trend_assets}};
    row["tickers"] = a.portfolio ? nlohmann::json(a.portfolio->tickers) : nlohmann::json::array();
    row["future_return_pct"] = a.future_return ? nlohmann::json(*a.future_return) : nlohmann::json(nullptr);
    row["rank"] = a.rank ? nlohmann::json(a.rank) : nlohmann::json(nullptr);
    row["rank_pool"] = a.rank_pool;
    runs.push_back(std::move(row));
  }
  nlohmann::json ranking = nlohmann::json::array(), positive = nlohmann::json::array();
  for (const auto& pr : summary.ranking) ranking.push_back(portfolio_json(pr));
  for (const auto& pr : summary.positive) positive.push_back(portfolio_json(pr));
  return {{"oracle_feasible_best",
           summary.oracle_feasible_best ? nlohmann::json(summary.oracle_feasible_best->str()) : nlohmann::json(nullptr)},
          {"negative_trend_threshold_pct", summary.negative_trend_threshold},
          {"runs", runs},
          {"ranking", ranking},
          {"positive", positive}};
}

}  // namespace qfolio
