#include "qfolio/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qfolio/error.hpp"

namespace qfolio {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  for (;;) {
    auto comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(begin)));
      return out;
    }
    out.push_back(trim(line.substr(begin, comma - begin)));
    begin = comma + 1;
  }
}

bool parse_price(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

struct RawRow {
  Date date;
  double price;
  std::size_t line;
};

}  // namespace

PriceSeries PriceSeries::restricted_to(const DateRange& window) const {
  PriceSeries out{ticker, {}};
  for (const auto& obs : observations)
    if (window.contains(obs.date)) out.observations.push_back(obs);
  return out;
}

std::vector<PriceSeries> parse_prices(std::string_view csv_text,
                                      std::span<const std::string> tickers,
                                      const DateRange& window) {
  std::map<std::string, std::vector<RawRow>, std::less<>> rows;

  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t pos = 0;
  while (pos < csv_text.size()) {
    auto nl = csv_text.find('\n', pos);
    std::string_view line =
        csv_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? csv_text.size() : nl + 1;
    ++line_no;

    line = trim(line);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;

    auto fields = split_commas(line);
    if (!saw_header) {
      if (fields.size() != 3 || fields[0] != "date" || fields[1] != "ticker" || fields[2] != "adj_close")
        throw MalformedRowError(line_no, "expected header 'date,ticker,adj_close'");
      saw_header = true;
      continue;
    }
    if (fields.size() != 3) throw MalformedRowError(line_no, "expected 3 fields");
    auto date = Date::parse(fields[0]);
    if (!date) throw MalformedRowError(line_no, "bad date '" + std::string(fields[0]) + "'");
    if (fields[1].empty()) throw MalformedRowError(line_no, "empty ticker");
    double price = 0.0;
    if (!parse_price(fields[2], price)) throw MalformedRowError(line_no, "bad price '" + std::string(fields[2]) + "'");
    if (price <= 0.0) throw MalformedRowError(line_no, "non-positive price");

    rows[std::string(fields[1])].push_back(RawRow{*date, price, line_no});
  }
  if (!saw_header) throw MalformedRowError(1, "missing header");

  std::vector<PriceSeries> out;
  out.reserve(tickers.size());
  for (const auto& ticker : tickers) {
    auto it = rows.find(ticker);
    if (it == rows.end()) throw Error(ErrorCode::MissingTicker, ticker);

    auto raw = it->second;
    std::stable_sort(raw.begin(), raw.end(), [](const RawRow& a, const RawRow& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < raw.size(); ++i)
      if (raw[i].date == raw[i - 1].date)
        throw MalformedRowError(std::max(raw[i].line, raw[i - 1].line),
                                "duplicate date " + raw[i].date.iso() + " for " + ticker);

    PriceSeries series{ticker, {}};
    for (const auto& r : raw)
      if (window.contains(r.date)) series.observations.push_back({r.date, r.price});
    if (series.observations.empty())
      throw Error(ErrorCode::EmptyWindow, ticker + " has no rows in " + window.start.iso() + ".." + window.end.iso());
    if (series.observations.size() < 2)
      throw Error(ErrorCode::SingleObservation, ticker + " has a single row in the window");
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<PriceSeries> load_prices(const std::filesystem::path& path,
                                     std::span<const std::string> tickers,
                                     const DateRange& window) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_prices(buf.str(), tickers, window);
}

MarketSnapshot compute_snapshot(std::span<const PriceSeries> series) {
  if (series.empty()) throw Error(ErrorCode::NoCommonDates, "no series");

  // Intersect date sets.
  std::vector<Date> common;
  for (const auto& obs : series.front().observations) common.push_back(obs.date);
  for (std::size_t k = 1; k < series.size(); ++k) {
    std::vector<Date> other;
    for (const auto& obs : series[k].observations) other.push_back(obs.date);
    std::vector<Date> merged;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(), std::back_inserter(merged));
    common = std::move(merged);
  }
  if (common.empty()) throw Error(ErrorCode::NoCommonDates, "series share no dates");
  if (common.size() < 2) throw Error(ErrorCode::SingleObservation, "only one common date");

  const std::size_t n = series.size();
  const std::size_t periods = common.size() - 1;

  MarketSnapshot snap;
  snap.dates = common;
  snap.mu.assign(n, 0.0);
  snap.sigma = Matrix(n);
  snap.daily_returns.resize(n);

  for (std::size_t a = 0; a < n; ++a) {
    snap.tickers.push_back(series[a].ticker);
    std::vector<double> px;
    px.reserve(common.size());
    auto it = series[a].observations.begin();
    for (const auto& d : common) {
      while (it->date < d) ++it;
      px.push_back(it->price);
    }
    auto& r = snap.daily_returns[a];
    r.resize(periods);
    for (std::size_t t = 0; t < periods; ++t) r[t] = px[t + 1] / px[t] - 1.0;

    double sum = 0.0;
    for (double v : r) sum += v;
    snap.mu[a] = sum / static_cast<double>(periods);
  }

  if (periods < 2) return snap;  // single return: sample covariance undefined, leave zero

  std::vector<std::vector<double>> centered(n, std::vector<double>(periods));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t t = 0; t < periods; ++t) centered[a][t] = snap.daily_returns[a][t] - snap.mu[a];

  const double denom = static_cast<double>(periods - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < periods; ++t) acc += centered[i][t] * centered[j][t];
      snap.sigma(i, j) = acc / denom;
      snap.sigma(j, i) = snap.sigma(i, j);
    }
  }
  return snap;
}

double period_return(const PriceSeries& series) {
  if (series.observations.size() < 2)
    throw Error(ErrorCode::SingleObservation, series.ticker + " needs at least two observations");
  const double start = series.observations.front().price;
  const double end = series.observations.back().price;
  return (end - start) / start * 100.0;
}

}  // namespace qfolio
