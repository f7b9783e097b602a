#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "qfolio/ansatz.hpp"
#include "qfolio/optimizers.hpp"
#include "qfolio/oracle.hpp"
#include "qfolio/qubo.hpp"
#include "qfolio/statevector.hpp"

namespace qfolio {

enum class OptimizerMethod { NelderMead, Spsa };
enum class CostMode { Exact, Sampled };

std::string_view to_string(OptimizerMethod m) noexcept;
std::string_view to_string(CostMode m) noexcept;
std::optional<OptimizerMethod> parse_method(std::string_view text);
/// Accepts "exact"/"sampled" and "EXACT_EXPECTATION"/"SAMPLED".
std::optional<CostMode> parse_cost_mode(std::string_view text);

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::NelderMead;
  std::size_t max_evaluations = 500;
  double initial_spread = 2.0 * std::numbers::pi;
  std::uint64_t seed = 0;
  CostMode cost_mode = CostMode::Exact;
  /// Shots per evaluation in SAMPLED mode, and for the final histogram in both modes.
  std::uint64_t shots = 1024;

  /// Throws InvalidConfig on max_evaluations == 0, shots == 0 or a negative spread.
  void validate() const;
  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

void to_json(nlohmann::json& j, const OptimizerConfig& c);
void from_json(const nlohmann::json& j, OptimizerConfig& c);

/// Seed streams derived from OptimizerConfig::seed.
namespace seed_stream {
inline constexpr std::uint64_t kInitialTheta = 0;
inline constexpr std::uint64_t kFinalHistogram = 1;
inline constexpr std::uint64_t kOptimizer = 2;
inline constexpr std::uint64_t kEvaluationBase = 16;  // + t for evaluation t
}  // namespace seed_stream

/// Binds theta, prepares the state and returns C(theta): either the exact
/// expectation of the Ising energy or the shot-sampled QUBO cost. Holds the
/// per-index cost table and a reusable state buffer.
class CostEvaluator {
 public:
  CostEvaluator(const ParameterizedCircuit& circuit, const IsingHamiltonian& ham, const QuboProblem& problem,
                CostMode mode, std::uint64_t shots);

  /// `sample_seed` is ignored in EXACT mode.
  double operator()(std::span<const double> theta, std::uint64_t sample_seed = 0);

  SampleHistogram histogram(std::span<const double> theta, std::uint64_t shots, std::uint64_t seed);
  const StateVector& state() const noexcept { return state_; }

 private:
  const ParameterizedCircuit& circuit_;
  std::vector<double> energies_;  // Ising energy per basis index
  std::vector<double> costs_;     // qubo_cost per basis index
  CostMode mode_;
  std::uint64_t shots_;
  StateVector state_;
};

double evaluate_cost(const ParameterizedCircuit& circuit, std::span<const double> theta, const IsingHamiltonian& ham,
                     const QuboProblem& problem, CostMode mode, std::uint64_t shots, std::uint64_t seed);

struct Evaluation {
  std::size_t t = 0;
  std::vector<double> theta;
  double cost = 0.0;
  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

struct OptimizationTrace {
  std::vector<Evaluation> evaluations;
  std::vector<double> deltas;  // deltas[t-1] = cost_t - cost_{t-1}
  std::vector<double> best_theta;
  double best_cost = 0.0;
  SampleHistogram final_histogram;
  Termination termination = Termination::BudgetExhausted;

  /// min_{s <= t} cost_s for every t.
  std::vector<double> running_best() const;
  friend bool operator==(const OptimizationTrace&, const OptimizationTrace&) = default;
};

/// Runs the configured optimizer from theta_0 ~ U[0, initial_spread)^k and
/// records every cost evaluation. Deterministic in (circuit, config).
OptimizationTrace minimize(const ParameterizedCircuit& circuit, const IsingHamiltonian& ham,
                           const QuboProblem& problem, const OptimizerConfig& config);

struct RunMetadata {
  AnsatzFamily family = AnsatzFamily::QAOA;
  std::size_t n = 0;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
  OptimizerConfig config;
};

struct ScoredOutcome {
  Bitstring bits;
  double probability = 0.0;
  double cost = 0.0;  // qubo_cost + offset
};

struct RunResult {
  RunMetadata metadata;
  OptimizationTrace trace;
  std::vector<ScoredOutcome> top_bitstrings;  // probability descending, then integer ascending
  std::optional<ScoredSelection> ground_truth;
  nlohmann::json circuit;                     // circuit summary

  /// Lowest qubo_cost + offset over every bitstring in the final histogram.
  ScoredOutcome best_sampled(const QuboProblem& problem) const;
  /// Most probable bitstring of the final histogram.
  const ScoredOutcome& top() const;
};

struct GridOptions {
  std::size_t jobs = 1;
  std::size_t top_k = 32;
  bool include_ground_truth = true;  // only honoured when n <= 16
};

inline constexpr std::size_t kGroundTruthMaxQubits = 16;

/// One optimisation run for a (family, depth, seed) triple.
RunResult run_single(const QuboProblem& problem, const IsingHamiltonian& ham, AnsatzFamily family,
                     std::size_t depth, const OptimizerConfig& config, const OracleResult* oracle,
                     std::size_t top_k = 32);

/// Every (family, depth, seed) combination, in that nesting order. Runs are
/// independent and execute on up to `options.jobs` threads; the returned
/// order does not depend on scheduling.
std::vector<RunResult> run_experiment_grid(const QuboProblem& problem, std::span<const AnsatzFamily> families,
                                           std::span<const std::size_t> depths,
                                           std::span<const std::uint64_t> seeds,
                                           const OptimizerConfig& config_template, const GridOptions& options = {});

/// `with_thetas` adds theta_t to every trace entry (large for wide circuits).
nlohmann::json to_json(const RunResult& r, bool with_thetas = false);
/// Inverse of to_json. Evaluations written without theta come back with an empty theta.
RunResult run_result_from_json(const nlohmann::json& j);

}  // namespace qfolio
