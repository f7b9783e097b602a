#!/usr/bin/env python3
"""Generate the bundled daily price fixture (data/prices.csv).

Daily adjusted closes are synthetic: a correlated log-normal Brownian bridge
per ticker, pinned exactly to the published window endpoints:

  * 2024-12-02 and 2025-05-30 closes for the optimization window
  * 2025-06-02 and 2025-06-20 closes for the held-out June window

Intermediate days only shape mu/sigma; the endpoint prices are what the
return tables are checked against. Output is deterministic for a given seed.
"""

import argparse
import datetime as dt

import numpy as np

TICKERS = ["AAPL", "GOOG", "MSFT", "TSLA", "AMZN", "NVDA", "GS", "MS", "NKE", "KO"]

# (2024-12-02, 2025-05-30) closes, kept as literal strings so they round-trip.
WINDOW_ENDPOINTS = {
    "AAPL": ("239.013428", "200.850006"),
    "GOOG": ("172.380157", "172.642487"),
    "MSFT": ("429.329376", "460.359985"),
    "TSLA": ("357.089996", "346.459991"),
    "AMZN": ("210.710007", "205.009995"),
    "NVDA": ("138.598068", "135.120621"),
    "GS": ("595.771423", "600.450012"),
    "MS": ("129.127823", "128.029999"),
    "NKE": ("78.172211", "60.189999"),
    "KO": ("62.737671", "71.590988"),
}

# (2025-06-02, 2025-06-20) closes.
JUNE_ENDPOINTS = {
    "AAPL": ("201.70", "201.00"),
    "GOOG": ("170.17", "167.73"),
    "MSFT": ("461.97", "477.40"),
    "TSLA": ("342.69", "322.16"),
    "AMZN": ("206.65", "209.69"),
    "NVDA": ("137.37", "143.85"),
    "GS": ("598.72", "640.80"),
    "MS": ("128.40", "132.71"),
    "NKE": ("61.57", "59.79"),
    "KO": ("71.49", "68.84"),
}

DAILY_VOL = {
    "AAPL": 0.020, "GOOG": 0.020, "MSFT": 0.016, "TSLA": 0.045, "AMZN": 0.022,
    "NVDA": 0.035, "GS": 0.020, "MS": 0.021, "NKE": 0.022, "KO": 0.011,
}

SECTOR = {
    "AAPL": 0, "GOOG": 0, "MSFT": 0, "TSLA": 0, "AMZN": 0, "NVDA": 0,
    "GS": 1, "MS": 1, "NKE": 2, "KO": 2,
}

NYSE_CLOSED = {
    dt.date(2024, 12, 25), dt.date(2025, 1, 1), dt.date(2025, 1, 9),
    dt.date(2025, 1, 20), dt.date(2025, 2, 17), dt.date(2025, 4, 18),
    dt.date(2025, 5, 26), dt.date(2025, 6, 19),
}


def trading_days(start, end):
    day = start
    out = []
    while day <= end:
        if day.weekday() < 5 and day not in NYSE_CLOSED:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def bridge(rng, days, endpoints, decimals):
    """Correlated log-price bridges; returns {ticker: [price strings]}."""
    steps = len(days) - 1
    market = rng.standard_normal(steps)
    sector = rng.standard_normal((3, steps))
    out = {}
    for ticker in TICKERS:
        idio = rng.standard_normal(steps)
        shock = 0.55 * market + 0.45 * sector[SECTOR[ticker]] + 0.70 * idio
        shock *= DAILY_VOL[ticker] / np.sqrt(0.55**2 + 0.45**2 + 0.70**2)
        walk = np.concatenate([[0.0], np.cumsum(shock)])
        start_s, end_s = endpoints[ticker]
        p0, p1 = float(start_s), float(end_s)
        frac = np.arange(len(days)) / steps
        log_path = np.log(p0) + walk - frac * walk[-1] + frac * np.log(p1 / p0)
        prices = [f"{np.exp(v):.{decimals}f}" for v in log_path]
        prices[0], prices[-1] = start_s, end_s
        out[ticker] = prices
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20250620)
    parser.add_argument("--out", default="data/prices.csv")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    window = trading_days(dt.date(2024, 12, 2), dt.date(2025, 5, 30))
    june = trading_days(dt.date(2025, 6, 2), dt.date(2025, 6, 20))
    window_px = bridge(rng, window, WINDOW_ENDPOINTS, 6)
    june_px = bridge(rng, june, JUNE_ENDPOINTS, 2)

    with open(args.out, "w", newline="\n") as fh:
        fh.write("date,ticker,adj_close\n")
        for days, px in ((window, window_px), (june, june_px)):
            for i, day in enumerate(days):
                for ticker in TICKERS:
                    fh.write(f"{day.isoformat()},{ticker},{px[ticker][i]}\n")


if __name__ == "__main__":
    main()
