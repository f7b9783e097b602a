#include "qfolio/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qfolio/error.hpp"
#include "qfolio/rng.hpp"

namespace qfolio {

namespace {

struct Exhausted {};

/// Counts calls, remembers the best point, and refuses to exceed the budget.
class Budgeted {
 public:
  Budgeted(const Objective& f, std::size_t budget) : f_(f), budget_(budget) {}

  double operator()(std::span<const double> x) {
    if (used_ >= budget_) throw Exhausted{};
    ++used_;
    const double v = f_(x);
    if (used_ == 1 || v < best_value_) {
      best_value_ = v;
      best_x_.assign(x.begin(), x.end());
    }
    return v;
  }

  OptimizerOutcome outcome(Termination why) const { return {best_x_, best_value_, used_, why}; }
  std::size_t remaining() const { return budget_ - used_; }

 private:
  const Objective& f_;
  std::size_t budget_;
  std::size_t used_ = 0;
  double best_value_ = 0.0;
  std::vector<double> best_x_;
};

}  // namespace

OptimizerOutcome nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options) {
  if (options.max_evaluations < 1) throw Error(ErrorCode::InvalidConfig, "max_evaluations must be >= 1");
  Budgeted eval(f, options.max_evaluations);
  const std::size_t dim = x0.size();

  struct Vertex {
    std::vector<double> x;
    double f;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);

  const auto combine = [dim](const std::vector<double>& a, const std::vector<double>& b, double t) {
    // a + t (b - a)
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };

  try {
    simplex.push_back({x0, eval(x0)});
    for (std::size_t i = 0; i < dim; ++i) {
      auto x = x0;
      x[i] += options.initial_step;
      const double v = eval(x);
      simplex.push_back({std::move(x), v});
    }

    for (;;) {
      std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

      double size = 0.0;
      for (std::size_t k = 1; k < simplex.size(); ++k)
        for (std::size_t i = 0; i < dim; ++i) size = std::max(size, std::abs(simplex[k].x[i] - simplex[0].x[i]));
      if (size < options.tolerance) return eval.outcome(Termination::Converged);

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[k].x[i];
      for (auto& c : centroid) c /= static_cast<double>(dim);

      Vertex& worst = simplex.back();
      const double f_best = simplex.front().f;
      const double f_second_worst = simplex[dim - 1].f;

      auto xr = combine(centroid, worst.x, -1.0);
      const double fr = eval(xr);

      if (fr < f_best) {
        auto xe = combine(centroid, worst.x, -2.0);
        const double fe = eval(xe);
        if (fe < fr)
          worst = {std::move(xe), fe};
        else
          worst = {std::move(xr), fr};
        continue;
      }
      if (fr < f_second_worst) {
        worst = {std::move(xr), fr};
        continue;
      }

      bool shrink = false;
      if (fr < worst.f) {
        auto xc = combine(centroid, xr, 0.5);
        const double fc = eval(xc);
        if (fc <= fr)
          worst = {std::move(xc), fc};
        else
          shrink = true;
      } else {
        auto xcc = combine(centroid, worst.x, 0.5);
        const double fcc = eval(xcc);
        if (fcc < worst.f)
          worst = {std::move(xcc), fcc};
        else
          shrink = true;
      }

      if (shrink) {
        for (std::size_t k = 1; k < simplex.size(); ++k) {
          simplex[k].x = combine(simplex[0].x, simplex[k].x, 0.5);
          simplex[k].f = eval(simplex[k].x);
        }
      }
    }
  } catch (const Exhausted&) {
    return eval.outcome(Termination::BudgetExhausted);
  }
}

OptimizerOutcome spsa(const Objective& f, std::vector<double> x0, const SpsaOptions& options) {
  if (options.max_evaluations < 1) throw Error(ErrorCode::InvalidConfig, "max_evaluations must be >= 1");
  Budgeted eval(f, options.max_evaluations);
  const std::size_t dim = x0.size();
  const std::size_t iterations = (options.max_evaluations - 1) / 2;
  const double stability = 0.1 * static_cast<double>(iterations);

  Xoshiro256 rng(options.seed);
  std::vector<double> x = std::move(x0);
  std::vector<double> delta(dim), plus(dim), minus(dim);
  double a = 0.0;

  eval(x);
  for (std::size_t k = 0; k < iterations; ++k) {
    const double ck = options.perturbation / std::pow(static_cast<double>(k + 1), options.gamma);
    for (std::size_t i = 0; i < dim; ++i) {
      delta[i] = (rng() >> 63) ? 1.0 : -1.0;
      plus[i] = x[i] + ck * delta[i];
      minus[i] = x[i] - ck * delta[i];
    }
    const double fp = eval(plus);
    const double fm = eval(minus);
    const double slope = (fp - fm) / (2.0 * ck);

    if (k == 0) {
      // |g_i| = |slope| for Rademacher perturbations
      const double magnitude = std::abs(slope);
      a = magnitude > 0.0
              ? options.target_first_step * std::pow(stability + 1.0, options.alpha) / magnitude
              : options.target_first_step;
    }
    const double ak = a / std::pow(static_cast<double>(k + 1) + stability, options.alpha);
    for (std::size_t i = 0; i < dim; ++i) x[i] -= ak * slope * delta[i];
  }
  if (eval.remaining() > 0) eval(x);
  return eval.outcome(Termination::ScheduleExhausted);
}

}  // namespace qfolio
