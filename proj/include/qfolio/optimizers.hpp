#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qfolio {

using Objective = std::function<double(std::span<const double>)>;

enum class Termination { Converged, BudgetExhausted, ScheduleExhausted };

struct OptimizerOutcome {
  std::vector<double> x;  // best point evaluated
  double value = 0.0;
  std::size_t evaluations = 0;
  Termination termination = Termination::BudgetExhausted;
};

struct NelderMeadOptions {
  std::size_t max_evaluations = 500;
  double initial_step = 0.5;  // simplex edge along each axis
  double tolerance = 1e-6;    // stop once every vertex is within this (inf-norm) of the best
};

/// Nelder-Mead with the standard coefficients (reflect 1, expand 2,
/// contract 1/2, shrink 1/2). Never calls `f` more than max_evaluations times.
OptimizerOutcome nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options);

struct SpsaOptions {
  std::size_t max_evaluations = 500;
  double perturbation = 0.1;          // c
  double target_first_step = 0.2;     // calibrates a from the first gradient estimate
  double alpha = 0.602;
  double gamma = 0.101;
  std::uint64_t seed = 0;
};

/// Simultaneous-perturbation stochastic approximation. Evaluates x0 once,
/// then spends two evaluations per iteration; a spare final evaluation is
/// used on the last iterate.
OptimizerOutcome spsa(const Objective& f, std::vector<double> x0, const SpsaOptions& options);

}  // namespace qfolio
