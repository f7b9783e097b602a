#include "qfolio/qubo.hpp"

#include <bit>

#include "qfolio/error.hpp"

namespace qfolio {

Bitstring Bitstring::parse(std::string_view text) {
  if (text.empty() || text.size() > 64) throw Error(ErrorCode::LengthMismatch, "bitstring length out of range");
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '1')
      bits |= std::uint64_t{1} << k;
    else if (text[k] != '0')
      throw Error(ErrorCode::LengthMismatch, "bitstring has non-binary character");
  }
  return Bitstring(text.size(), bits);
}

std::size_t Bitstring::popcount() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::string Bitstring::str() const {
  std::string out(n_, '0');
  for (std::size_t k = 0; k < n_; ++k)
    if ((*this)[k]) out[k] = '1';
  return out;
}

QuboProblem build_qubo(std::span<const double> mu, const Matrix& sigma, double q, double alpha,
                       std::size_t budget) {
  const std::size_t n = mu.size();
  if (sigma.size() != n) throw Error(ErrorCode::DimensionMismatch, "mu and sigma disagree on n");
  if (n < 2 || budget < 1 || budget > n)
    throw Error(ErrorCode::BudgetOutOfRange,
                "need n >= 2 and 1 <= B <= n (n=" + std::to_string(n) + ", B=" + std::to_string(budget) + ")");
  if (!(alpha > 0.0)) throw Error(ErrorCode::NonPositivePenalty, "alpha must be > 0");

  QuboProblem p;
  p.n = n;
  p.Q = Matrix(n);
  p.params = QuboParams{q, alpha, budget};
  p.offset = alpha * static_cast<double>(budget) * static_cast<double>(budget);
  p.mu.assign(mu.begin(), mu.end());
  p.sigma = sigma;

  const double b = static_cast<double>(budget);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j)
        p.Q(i, i) = q * sigma(i, i) - mu[i] + alpha * (1.0 - 2.0 * b);
      else  // average both triangles so Q is exactly symmetric
        p.Q(i, j) = q * 0.5 * (sigma(i, j) + sigma(j, i)) + alpha;
    }
  }
  return p;
}

QuboProblem build_qubo(const MarketSnapshot& snapshot, double q, double alpha, std::size_t budget) {
  auto p = build_qubo(snapshot.mu, snapshot.sigma, q, alpha, budget);
  p.tickers = snapshot.tickers;
  return p;
}

double qubo_cost(const QuboProblem& problem, const Bitstring& x) {
  if (x.size() != problem.n) throw Error(ErrorCode::LengthMismatch, "bitstring length != n");
  double cost = 0.0;
  for (std::size_t i = 0; i < problem.n; ++i) {
    if (!x[i]) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < problem.n; ++j)
      if (x[j]) row += problem.Q(i, j);
    cost += row;
  }
  return cost;
}

double mean_variance_objective(const QuboProblem& problem, const Bitstring& x) {
  if (x.size() != problem.n) throw Error(ErrorCode::LengthMismatch, "bitstring length != n");
  double risk = 0.0, ret = 0.0;
  for (std::size_t i = 0; i < problem.n; ++i) {
    if (!x[i]) continue;
    ret += problem.mu[i];
    for (std::size_t j = 0; j < problem.n; ++j)
      if (x[j]) risk += problem.sigma(i, j);
  }
  return problem.params.risk_aversion * risk - ret;
}

double IsingHamiltonian::energy(std::uint64_t x) const noexcept {
  // z_k = +1 when x_k = 0
  double e = constant;
  for (std::size_t k = 0; k < n; ++k) e += ((x >> k) & 1U) ? -h[k] : h[k];
  for (const auto& c : J) {
    const bool differ = (((x >> c.i) ^ (x >> c.j)) & 1U) != 0;
    e += differ ? -c.value : c.value;
  }
  return e;
}

double IsingHamiltonian::energy(const Bitstring& x) const {
  if (x.size() != n) throw Error(ErrorCode::LengthMismatch, "bitstring length != n");
  return energy(x.bits());
}

std::vector<double> IsingHamiltonian::energy_table() const {
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<double> table(dim);
  for (std::uint64_t x = 0; x < dim; ++x) table[x] = energy(x);
  return table;
}

IsingHamiltonian to_ising(const QuboProblem& problem) {
  // Q_ii x_i        = Q_ii/2 (1 - z_i)
  // 2 Q_ij x_i x_j  = Q_ij/2 (1 - z_i - z_j + z_i z_j)     (i < j, Q symmetric)
  const std::size_t n = problem.n;
  IsingHamiltonian ham;
  ham.n = n;
  ham.h.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    ham.h[i] -= problem.Q(i, i) / 2.0;
    ham.constant += problem.Q(i, i) / 2.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double merged = 0.5 * (problem.Q(i, j) + problem.Q(j, i));  // = Q_ij when symmetric
      if (merged == 0.0) continue;
      ham.J.push_back({i, j, merged / 2.0});
      ham.h[i] -= merged / 2.0;
      ham.h[j] -= merged / 2.0;
      ham.constant += merged / 2.0;
    }
  }
  return ham;
}

void to_json(nlohmann::json& j, const QuboProblem& p) {
  j = nlohmann::json{{"n", p.n},
                     {"Q", std::vector<double>(p.Q.data().begin(), p.Q.data().end())},
                     {"offset", p.offset},
                     {"params", {{"q", p.params.risk_aversion}, {"alpha", p.params.penalty}, {"B", p.params.budget}}}};
  if (!p.tickers.empty()) j["tickers"] = p.tickers;
  if (!p.mu.empty()) {
    j["mu"] = p.mu;
    j["sigma"] = std::vector<double>(p.sigma.data().begin(), p.sigma.data().end());
  }
}

void from_json(const nlohmann::json& j, QuboProblem& p) {
  p.n = j.at("n").get<std::size_t>();
  auto flat = j.at("Q").get<std::vector<double>>();
  if (flat.size() != p.n * p.n) throw Error(ErrorCode::DimensionMismatch, "Q has wrong element count");
  p.Q = Matrix(p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t k = 0; k < p.n; ++k) p.Q(i, k) = flat[i * p.n + k];
  p.offset = j.at("offset").get<double>();
  const auto& params = j.at("params");
  p.params = QuboParams{params.at("q").get<double>(), params.at("alpha").get<double>(),
                        params.at("B").get<std::size_t>()};
  p.tickers = j.value("tickers", std::vector<std::string>{});
  p.mu = j.value("mu", std::vector<double>{});
  p.sigma = Matrix();
  if (j.contains("sigma")) {
    auto s = j.at("sigma").get<std::vector<double>>();
    if (s.size() != p.n * p.n) throw Error(ErrorCode::DimensionMismatch, "sigma has wrong element count");
    p.sigma = Matrix(p.n);
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t k = 0; k < p.n; ++k) p.sigma(i, k) = s[i * p.n + k];
  }
}

void to_json(nlohmann::json& j, const IsingHamiltonian& h) {
  nlohmann::json couplings = nlohmann::json::array();
  for (const auto& c : h.J) couplings.push_back({c.i, c.j, c.value});
  j = nlohmann::json{{"n", h.n}, {"h", h.h}, {"J", couplings}, {"constant", h.constant}};
}

}  // namespace qfolio
