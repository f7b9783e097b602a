#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qfolio/market_data.hpp"

namespace qfolio {

/// A selection vector x in {0,1}^n. Bit k of the integer encoding is x_k
/// (little-endian), and character k of the text form is x_k.
class Bitstring {
 public:
  Bitstring() = default;
  Bitstring(std::size_t n, std::uint64_t bits) : n_(n), bits_(bits) {}

  /// Parses a string of '0'/'1' characters; throws LengthMismatch otherwise.
  static Bitstring parse(std::string_view text);

  std::size_t size() const noexcept { return n_; }
  std::uint64_t bits() const noexcept { return bits_; }
  bool operator[](std::size_t k) const noexcept { return (bits_ >> k) & 1U; }
  std::size_t popcount() const noexcept;
  std::string str() const;

  friend bool operator==(const Bitstring&, const Bitstring&) = default;
  friend auto operator<=>(const Bitstring& a, const Bitstring& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::size_t n_ = 0;
  std::uint64_t bits_ = 0;
};

struct QuboParams {
  double risk_aversion = 0.5;  // q
  double penalty = 1.0;        // alpha
  std::size_t budget = 1;      // B

  friend bool operator==(const QuboParams&, const QuboParams&) = default;
};

/// min x^T Q x + offset, with Q symmetric.
struct QuboProblem {
  std::size_t n = 0;
  Matrix Q;
  double offset = 0.0;
  QuboParams params;
  std::vector<std::string> tickers;  // optional labels, universe order
  std::vector<double> mu;
  Matrix sigma;

  friend bool operator==(const QuboProblem&, const QuboProblem&) = default;
};

/// Penalty-augmented mean-variance QUBO:
///   Q_ij = q*Sigma_ij + alpha           (i != j)
///   Q_ii = q*Sigma_ii - mu_i + alpha*(1 - 2B)
///   offset = alpha*B^2
/// Throws BudgetOutOfRange unless 1 <= B <= n (n >= 2), NonPositivePenalty unless alpha > 0.
QuboProblem build_qubo(const MarketSnapshot& snapshot, double q, double alpha, std::size_t budget);

/// Same construction from raw mu / sigma.
QuboProblem build_qubo(std::span<const double> mu, const Matrix& sigma, double q, double alpha,
                       std::size_t budget);

/// x^T Q x without the offset. Throws LengthMismatch if |x| != n.
double qubo_cost(const QuboProblem& problem, const Bitstring& x);

/// q x^T Sigma x - mu^T x, the unpenalized objective.
double mean_variance_objective(const QuboProblem& problem, const Bitstring& x);

/// H = sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j + constant, spin z_k = 1 - 2 x_k.
struct IsingHamiltonian {
  struct Coupling {
    std::size_t i;
    std::size_t j;  // i < j
    double value;
    friend bool operator==(const Coupling&, const Coupling&) = default;
  };

  std::size_t n = 0;
  std::vector<double> h;
  std::vector<Coupling> J;  // sorted by (i, j)
  double constant = 0.0;

  /// Energy of the computational basis state with integer encoding `x`.
  double energy(std::uint64_t x) const noexcept;
  double energy(const Bitstring& x) const;

  /// Energies of all 2^n basis states, indexed by integer encoding.
  std::vector<double> energy_table() const;

  friend bool operator==(const IsingHamiltonian&, const IsingHamiltonian&) = default;
};

/// Substitutes x_i = (1 - Z_i)/2. The result satisfies energy(x) == qubo_cost(x)
/// for every x; the problem offset is not folded into `constant`.
IsingHamiltonian to_ising(const QuboProblem& problem);

void to_json(nlohmann::json& j, const QuboProblem& p);
void from_json(const nlohmann::json& j, QuboProblem& p);
void to_json(nlohmann::json& j, const IsingHamiltonian& h);

}  // namespace qfolio
