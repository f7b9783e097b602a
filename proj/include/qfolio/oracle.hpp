#pragma once

#include <optional>

#include "json.hpp"

#include "qfolio/qubo.hpp"

namespace qfolio {

inline constexpr std::size_t kMaxOracleQubits = 24;

struct ScoredSelection {
  Bitstring bits;
  double cost = 0.0;  // qubo_cost + offset
  friend bool operator==(const ScoredSelection&, const ScoredSelection&) = default;
};

struct SpectrumStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Exhaustive ground truth. All costs include the problem offset.
struct OracleResult {
  Bitstring best_bitstring;
  double best_cost = 0.0;
  /// Minimum over bitstrings with exactly B ones.
  std::optional<ScoredSelection> feasible_best;
  SpectrumStats spectrum;
  std::size_t feasible_count = 0;
};

/// Scans all 2^n bitstrings in Gray-code order with O(n) incremental updates.
/// Ties (within floating-point noise, re-checked by direct evaluation) go to
/// the smallest integer encoding. Throws TooLarge when n > 24.
OracleResult solve_exact(const QuboProblem& problem);

void to_json(nlohmann::json& j, const OracleResult& r);

}  // namespace qfolio
