#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qfolio/market_data.hpp"
#include "qfolio/qubo.hpp"
#include "qfolio/rng.hpp"
#include "qfolio/statevector.hpp"

namespace qtest {

using qfolio::cplx;

inline std::filesystem::path data_dir() { return QFOLIO_DATA_DIR; }
inline std::filesystem::path prices_csv() { return data_dir() / "prices.csv"; }

struct PricePair {
  const char* ticker;
  double start;
  double end;
  double published;  // percent, as printed
};

// 6-month window, 2024-12-02 to 2025-05-30.
inline const std::vector<PricePair> kSixMonth = {
    {"AAPL", 239.013428, 200.850006, -15.9670619}, {"GOOG", 172.380157, 172.642487, 0.152181089},
    {"MSFT", 429.329376, 460.359985, 7.22769294},  {"TSLA", 357.089996, 346.459991, -2.976842006},
    {"AMZN", 210.710007, 205.009995, -2.705145371}, {"NVDA", 138.598068, 135.120621, -2.509015494},
    {"GS", 595.771423, 600.450012, 0.785299331},    {"MS", 129.127823, 128.029999, -0.85018393},
    {"NKE", 78.172211, 60.189999, -23.00333043},    {"KO", 62.737671, 71.590988, 14.11164434},
};

// June window, 2025-06-02 to 2025-06-20.
inline const std::vector<PricePair> kJune = {
    {"AAPL", 201.70, 201.00, -0.35}, {"GOOG", 170.17, 167.73, -1.43}, {"MSFT", 461.97, 477.40, 3.34},
    {"TSLA", 342.69, 322.16, -5.99}, {"AMZN", 206.65, 209.69, 1.47},  {"NVDA", 137.37, 143.85, 4.72},
    {"GS", 598.72, 640.80, 7.03},    {"MS", 128.40, 132.71, 3.36},    {"NKE", 61.57, 59.79, -2.89},
    {"KO", 71.49, 68.84, -3.71},
};

inline const std::vector<std::string> kUniverse4 = {"AAPL", "GOOG", "MSFT", "TSLA"};
inline const std::vector<std::string> kUniverse10 = {"AAPL", "GOOG", "MSFT", "TSLA", "AMZN",
                                                     "NVDA", "GS",   "MS",   "NKE",  "KO"};

/// Two-row-per-ticker CSV text for a table of start/end prices.
inline std::string endpoint_csv(const std::vector<PricePair>& rows, const char* start, const char* end) {
  std::string csv = "date,ticker,adj_close\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.9g\n%s,%s,%.9g\n", start, r.ticker, r.start, end, r.ticker, r.end);
    csv += buf;
  }
  return csv;
}

inline double normal(qfolio::Xoshiro256& rng) {
  // Box-Muller; one draw per call is enough for test data.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

inline double uniform(qfolio::Xoshiro256& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// Random PSD covariance A A^T / n and returns in the range seen for daily data.
inline std::pair<std::vector<double>, qfolio::Matrix> random_market(qfolio::Xoshiro256& rng, std::size_t n) {
  qfolio::Matrix a(n), sigma(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.02 * normal(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * a(j, k);
      sigma(i, j) = s / static_cast<double>(n);
    }
  std::vector<double> mu(n);
  for (auto& m : mu) m = 0.002 * normal(rng);
  return {mu, sigma};
}

inline qfolio::QuboProblem random_qubo(qfolio::Xoshiro256& rng, std::size_t n) {
  auto [mu, sigma] = random_market(rng, n);
  const double q = uniform(rng, 0.0, 2.0);
  const double alpha = uniform(rng, 0.1, 5.0);
  const std::size_t budget = 1 + rng.below(n);
  return qfolio::build_qubo(mu, sigma, q, alpha, budget);
}

/// A QuboProblem with an arbitrary symmetric Q (not from market data).
inline qfolio::QuboProblem random_raw_qubo(qfolio::Xoshiro256& rng, std::size_t n, double scale = 1.0) {
  qfolio::QuboProblem p;
  p.n = n;
  p.Q = qfolio::Matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) p.Q(i, j) = p.Q(j, i) = scale * uniform(rng, -1.0, 1.0);
  p.offset = uniform(rng, -1.0, 1.0);
  p.params.budget = 1 + rng.below(n);
  return p;
}

/// Plain double loop over the bit vector.
inline double naive_cost(const qfolio::Matrix& Q, std::uint64_t bits, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += Q(i, j) * double((bits >> i) & 1U) * double((bits >> j) & 1U);
  return s;
}

/// Dense 2^n x 2^n reference for one gate, built from matrix elements only.
using Dense = std::vector<std::vector<cplx>>;

inline Dense identity(std::size_t dim) {
  Dense m(dim, std::vector<cplx>(dim));
  for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1.0;
  return m;
}

inline Dense dense_gate(std::size_t n, const qfolio::Gate& g, const std::vector<double>& params) {
  using qfolio::GateKind;
  const std::size_t dim = std::size_t{1} << n;
  Dense u(dim, std::vector<cplx>(dim));
  const cplx I(0.0, 1.0);
  const double angle = g.kind == GateKind::CX || g.kind == GateKind::CZ || g.kind == GateKind::H
                           ? 0.0
                           : (g.slot >= 0 ? g.scale * params.at(static_cast<std::size_t>(g.slot)) : g.angle);
  for (std::size_t b = 0; b < dim; ++b) {
    switch (g.kind) {
      case GateKind::DiagonalPhase:
        u[b][b] = std::exp(-I * angle * (*g.diagonal)[b]);
        break;
      case GateKind::CZ: {
        const bool both = ((b >> g.qubits[0]) & 1U) && ((b >> g.qubits[1]) & 1U);
        u[b][b] = both ? -1.0 : 1.0;
        break;
      }
      case GateKind::CX: {
        const std::size_t a = ((b >> g.qubits[0]) & 1U) ? b ^ (std::size_t{1} << g.qubits[1]) : b;
        u[a][b] = 1.0;
        break;
      }
      default: {
        const std::size_t t = g.qubits[0];
        cplx m[2][2];
        const double c = std::cos(angle / 2), s = std::sin(angle / 2);
        if (g.kind == GateKind::RX) {
          m[0][0] = c; m[0][1] = -I * s; m[1][0] = -I * s; m[1][1] = c;
        } else if (g.kind == GateKind::RY) {
          m[0][0] = c; m[0][1] = -s; m[1][0] = s; m[1][1] = c;
        } else if (g.kind == GateKind::RZ) {
          m[0][0] = std::exp(-I * angle / 2.0); m[0][1] = 0; m[1][0] = 0; m[1][1] = std::exp(I * angle / 2.0);
        } else {
          const double r = 1.0 / std::sqrt(2.0);
          m[0][0] = r; m[0][1] = r; m[1][0] = r; m[1][1] = -r;
        }
        const std::size_t bt = (b >> t) & 1U;
        for (std::size_t at = 0; at < 2; ++at) {
          const std::size_t a = (b & ~(std::size_t{1} << t)) | (at << t);
          u[a][b] = m[at][bt];
        }
      }
    }
  }
  return u;
}

inline std::vector<cplx> mat_vec(const Dense& m, const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

/// Applies a whole gate list with dense matrices starting from `v`.
inline std::vector<cplx> dense_run(std::size_t n, const std::vector<qfolio::Gate>& gates,
                                   const std::vector<double>& params, std::vector<cplx> v) {
  for (const auto& g : gates) v = mat_vec(dense_gate(n, g, params), v);
  return v;
}

/// Random gate over n qubits; rotation angles fixed in the gate.
inline qfolio::Gate random_gate(qfolio::Xoshiro256& rng, std::size_t n) {
  using qfolio::Gate;
  using qfolio::GateKind;
  const auto kind = rng.below(n >= 2 ? 6 : 4);
  const std::size_t a = rng.below(n);
  std::size_t b = rng.below(n - (n >= 2 ? 1 : 0));
  if (n >= 2 && b >= a) ++b;
  const double angle = uniform(rng, -6.3, 6.3);
  switch (kind) {
    case 0: return Gate::fixed(GateKind::RX, a, angle);
    case 1: return Gate::fixed(GateKind::RY, a, angle);
    case 2: return Gate::fixed(GateKind::RZ, a, angle);
    case 3: return Gate::h(a);
    case 4: return Gate::cx(a, b);
    default: return Gate::cz(a, b);
  }
}

}  // namespace qtest
