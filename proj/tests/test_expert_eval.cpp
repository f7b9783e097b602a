#include "doctest.h"

#include <algorithm>
#include <cstdio>

#include "qfolio/error.hpp"
#include "qfolio/expert_eval.hpp"
#include "support.hpp"

using namespace qfolio;

namespace {

const DateRange kJuneWindow{*Date::parse("2025-06-02"), *Date::parse("2025-06-20")};

std::vector<PriceSeries> june_prices() {
  const auto csv = qtest::endpoint_csv(qtest::kJune, "2025-06-02", "2025-06-20");
  return parse_prices(csv, qtest::kUniverse10, kJuneWindow);
}

ReturnMap june_returns() {
  ReturnMap m;
  for (const auto& r : qtest::kJune) m.emplace(r.ticker, r.published);
  return m;
}

Portfolio manual(std::vector<std::string> tickers) { return Portfolio::from_tickers(qtest::kUniverse10, tickers); }

double two_dp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::stod(buf);
}

}  // namespace

TEST_CASE("portfolio construction") {
  const auto p = manual({"MSFT", "GOOG"});
  CHECK(p.tickers == std::vector<std::string>{"GOOG", "MSFT"});
  CHECK(p.selection.str() == "0110000000");
  CHECK(p.selection.popcount() == p.tickers.size());
  CHECK(p.source.label() == "MANUAL");
  CHECK(p.joined() == "GOOG, MSFT");
  CHECK_THROWS_AS(manual({"ZZZZ"}), Error);
  CHECK_THROWS_AS(manual({}), Error);
  CHECK(PortfolioSource::run(AnsatzFamily::EfficientSU2, 2, 3).label() == "EFFICIENT_SU2/d2/s3");
}

TEST_CASE("portfolio_return") {
  const ReturnMap two{{"GOOG", -1.43}, {"MSFT", 3.34}};
  const double r = portfolio_return(manual({"GOOG", "MSFT"}), two);
  CHECK(r == doctest::Approx(0.955));
  CHECK(std::abs(two_dp(r) - 0.95) <= 0.01 + 1e-12);
  CHECK(two_dp(portfolio_return(manual({"GOOG", "MSFT", "KO", "GS", "NVDA"}), june_returns())) == 1.99);
  CHECK(portfolio_return(manual({"KO"}), june_returns()) == -3.71);
  try {
    portfolio_return(manual({"GOOG", "KO"}), two);
    FAIL("expected MissingReturn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingReturn);
  }
}

TEST_CASE("portfolio_return ignores ticker order") {
  Xoshiro256 rng(1);
  const auto returns = june_returns();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> t;
    for (const auto& u : qtest::kUniverse10)
      if (rng.below(2)) t.push_back(u);
    if (t.empty()) continue;
    auto shuffled = t;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    Portfolio a{t, {}, {}}, b{shuffled, {}, {}};
    CHECK(portfolio_return(a, returns) == doctest::Approx(portfolio_return(b, returns)).epsilon(1e-15));
  }
}

TEST_CASE("backtest examples") {
  const std::vector<Portfolio> ps{manual({"MSFT", "TSLA"})};
  const auto report = backtest(ps, june_prices(), kJuneWindow);
  const auto returns = report.returns();
  CHECK(two_dp(returns.at("AAPL")) == -0.35);
  CHECK(two_dp(returns.at("GS")) == 7.03);
  CHECK(report.per_asset[0].start_price == 201.70);
  CHECK(report.per_asset[0].end_price == 201.00);
  CHECK(two_dp(report.per_portfolio[0].average_pct) == -1.33);
}

TEST_CASE("backtest errors") {
  const std::vector<Portfolio> ps{manual({"MSFT", "TSLA"})};
  auto prices = june_prices();
  prices.erase(prices.begin() + 2);  // MSFT
  try {
    backtest(ps, prices, kJuneWindow);
    FAIL("expected MissingTicker");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingTicker);
  }
  const DateRange later{*Date::parse("2026-01-01"), *Date::parse("2026-02-01")};
  CHECK_THROWS_AS(backtest(ps, june_prices(), later), Error);
}

TEST_CASE("backtest averages match an independent summation for every subset") {
  const auto prices = june_prices();
  std::vector<Portfolio> all;
  for (std::uint64_t x = 1; x < 1024; ++x)
    all.push_back(Portfolio::from_selection(qtest::kUniverse10, Bitstring(10, x)));
  const auto report = backtest(all, prices, kJuneWindow);
  const auto returns = report.returns();
  for (std::size_t k = 0; k < all.size(); ++k) {
    // direct from prices, Kahan-free reverse order
    double s = 0;
    const auto& t = all[k].tickers;
    for (auto it = t.rbegin(); it != t.rend(); ++it) {
      const auto& a = *std::find_if(report.per_asset.begin(), report.per_asset.end(),
                                    [&](const AssetReturn& r) { return r.ticker == *it; });
      s += (a.end_price - a.start_price) / a.start_price * 100.0;
    }
    CHECK(std::abs(report.per_portfolio[k].average_pct - s / double(t.size())) < 1e-12);
  }

  // ranking is a total order consistent with ranks_before
  for (std::size_t r = 1; r < report.ranking.size(); ++r) {
    const auto& a = report.per_portfolio[report.ranking[r - 1]];
    const auto& b = report.per_portfolio[report.ranking[r]];
    CHECK(ranks_before(a, b));
    CHECK_FALSE(ranks_before(b, a));
  }
}

TEST_CASE("ranks_before is a strict total order on random triples") {
  Xoshiro256 rng(4);
  const auto returns = june_returns();
  std::vector<PortfolioReturn> pool;
  for (int i = 0; i < 60; ++i) {
    Portfolio p = Portfolio::from_selection(qtest::kUniverse10, Bitstring(10, 1 + rng.below(1023)));
    if (i % 3 == 0) p.source = PortfolioSource::run(AnsatzFamily::QAOA, 2, i);
    // coarse averages force plenty of ties
    pool.push_back({p, double(rng.below(3))});
  }
  for (const auto& a : pool) {
    CHECK_FALSE(ranks_before(a, a));
    for (const auto& b : pool) {
      if (&a == &b) continue;
      if (a.portfolio.joined() == b.portfolio.joined() && a.portfolio.source == b.portfolio.source &&
          a.average_pct == b.average_pct)
        continue;
      CHECK(ranks_before(a, b) != ranks_before(b, a));
      for (const auto& c : pool)
        if (ranks_before(a, b) && ranks_before(b, c)) CHECK(ranks_before(a, c));
    }
  }
}

TEST_CASE("subset rank by enumeration") {
  const auto returns = june_returns();
  const auto p = manual({"GOOG", "MSFT", "KO", "GS", "NVDA"});
  const auto rank = subset_rank(qtest::kUniverse10, p.selection, returns);

  // independent count over all 5-subsets
  std::vector<std::pair<double, std::string>> all;
  for (std::uint64_t x = 0; x < 1024; ++x) {
    if (std::popcount(x) != 5) continue;
    const auto q = Portfolio::from_selection(qtest::kUniverse10, Bitstring(10, x));
    all.emplace_back(-portfolio_return(q, returns), q.joined());
  }
  CHECK(all.size() == 252);
  std::sort(all.begin(), all.end());
  const auto pos = std::find(all.begin(), all.end(), std::make_pair(-portfolio_return(p, returns), p.joined()));
  CHECK(rank == std::size_t(pos - all.begin()) + 1);

  // the best 2-subset of the 4-asset universe on June returns is [AAPL, MSFT]
  const auto pair = Portfolio::from_tickers(qtest::kUniverse4, std::vector<std::string>{"AAPL", "MSFT"});
  CHECK(subset_rank(qtest::kUniverse4, pair.selection, returns) == 1);
}

TEST_CASE("feasibility summary") {
  const auto prices = parse_prices(qtest::endpoint_csv(qtest::kJune, "2025-06-02", "2025-06-20"), qtest::kUniverse4,
                                   kJuneWindow);
  std::vector<Portfolio> table;
  for (auto t : {std::vector<std::string>{"GOOG", "MSFT"}, {"AAPL", "TSLA"}, {"GOOG", "TSLA"}, {"MSFT", "TSLA"}})
    table.push_back(Portfolio::from_tickers(qtest::kUniverse4, t));
  const auto report = backtest(table, prices, kJuneWindow);

  OracleResult oracle;
  oracle.feasible_best = ScoredSelection{Bitstring::parse("0110"), -0.5};

  RunResult hit, miss;
  hit.metadata = {AnsatzFamily::RealAmplitudes, 4, 2, 0, {}};
  hit.top_bitstrings = {{Bitstring::parse("0110"), 0.6, -0.5}};
  miss.metadata = {AnsatzFamily::QAOA, 4, 10, 1, {}};
  miss.top_bitstrings = {{Bitstring::parse("1001"), 0.4, -0.1}};
  const std::vector<RunResult> runs{hit, miss};

  FeasibilityOptions opts;
  for (const auto& r : qtest::kSixMonth) opts.trailing_returns.emplace(r.ticker, r.published);
  const auto s = feasibility_summary(report, oracle, runs, qtest::kUniverse4, opts);

  REQUIRE(s.runs.size() == 2);
  CHECK(s.runs[0].matches_ground_truth);
  CHECK_FALSE(s.runs[1].matches_ground_truth);
  CHECK(two_dp(*s.runs[0].future_return) == 0.95);
  CHECK(s.runs[0].rank_pool == 6);
  CHECK(s.runs[0].rank == 2);
  CHECK(s.runs[0].negative_trend_assets.empty());
  CHECK(s.runs[1].negative_trend_assets == std::vector<std::string>{"AAPL"});
  REQUIRE(s.positive.size() == 1);
  CHECK(s.positive[0].portfolio.joined() == "GOOG, MSFT");
  CHECK(s.ranking.size() == 4);

  const auto md = to_markdown(report, &s);
  CHECK(md.find("Only positive-return portfolio: [GOOG, MSFT]") != std::string::npos);
  CHECK(md.find("| GOOG | 170.17 | 167.73 | -1.43 |") != std::string::npos);
  const auto j = to_json(s);
  CHECK(j.at("positive").size() == 1);
  CHECK(j.at("runs")[0].at("matches_ground_truth") == true);
  CHECK(to_json(report).at("per_asset").size() == 4);
}
