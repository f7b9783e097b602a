#include "qfolio/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "qfolio/error.hpp"

namespace qfolio {

namespace {

constexpr std::uint64_t kResyncInterval = std::uint64_t{1} << 16;

// Candidate minimisers gathered during the incremental scan; resolved with
// exact re-evaluation at the end so accumulated rounding cannot pick the
// wrong tie.
class MinTracker {
 public:
  explicit MinTracker(double tol) : tol_(tol) {}

  void offer(std::uint64_t x, double cost) {
    if (cost < best_ - tol_) {
      best_ = cost;
      candidates_.clear();
      candidates_.push_back(x);
    } else if (cost <= best_ + tol_) {
      if (cost < best_) best_ = cost;
      candidates_.push_back(x);
    }
  }

  bool empty() const { return candidates_.empty(); }

  ScoredSelection resolve(const QuboProblem& p) const {
    double exact_min = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::uint64_t, double>> exact;
    for (auto x : candidates_) {
      const double c = qubo_cost(p, Bitstring(p.n, x));
      exact.emplace_back(x, c);
      exact_min = std::min(exact_min, c);
    }
    const double tie = 1e-12 * (1.0 + std::abs(exact_min));
    ScoredSelection out{Bitstring(p.n, std::numeric_limits<std::uint64_t>::max()), 0.0};
    bool found = false;
    for (const auto& [x, c] : exact) {
      if (c > exact_min + tie) continue;
      if (!found || x < out.bits.bits()) {
        out = {Bitstring(p.n, x), c + p.offset};
        found = true;
      }
    }
    return out;
  }

 private:
  double tol_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> candidates_;
};

}  // namespace

OracleResult solve_exact(const QuboProblem& problem) {
  const std::size_t n = problem.n;
  if (n > kMaxOracleQubits) throw Error(ErrorCode::TooLarge, "exhaustive scan limited to 24 variables");
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty problem");

  double scale = 0.0;
  for (double v : problem.Q.data()) scale += std::abs(v);
  const double tol = 1e-9 * (1.0 + scale);

  const std::size_t budget = problem.params.budget;
  MinTracker all(tol), feasible(tol);

  // field[k] = sum_{j != k} Q_kj x_j
  std::vector<double> field(n, 0.0);
  std::uint64_t x = 0;
  double cost = 0.0;
  double hi = 0.0, sum = 0.0;
  std::size_t feasible_count = 0;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      const auto k = static_cast<std::size_t>(std::countr_zero(step));
      const bool setting = ((x >> k) & 1U) == 0;
      const double delta = problem.Q(k, k) + 2.0 * field[k];
      cost += setting ? delta : -delta;
      x ^= std::uint64_t{1} << k;
      const double sign = setting ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) field[j] += sign * problem.Q(j, k);
      if (step % kResyncInterval == 0) cost = qubo_cost(problem, Bitstring(n, x));
    }

    hi = step == 0 ? cost : std::max(hi, cost);
    sum += cost;
    all.offer(x, cost);
    if (static_cast<std::size_t>(std::popcount(x)) == budget) {
      feasible.offer(x, cost);
      ++feasible_count;
    }
  }

  OracleResult out;
  const auto best = all.resolve(problem);
  out.best_bitstring = best.bits;
  out.best_cost = best.cost;
  if (!feasible.empty()) out.feasible_best = feasible.resolve(problem);
  out.feasible_count = feasible_count;
  out.spectrum = {out.best_cost, hi + problem.offset, sum / static_cast<double>(total) + problem.offset};
  return out;
}

void to_json(nlohmann::json& j, const OracleResult& r) {
  j = nlohmann::json{{"best_bitstring", r.best_bitstring.str()},
                     {"best_cost", r.best_cost},
                     {"feasible_count", r.feasible_count},
                     {"spectrum", {{"min", r.spectrum.min}, {"max", r.spectrum.max}, {"mean", r.spectrum.mean}}}};
  if (r.feasible_best)
    j["feasible_best"] = {{"bitstring", r.feasible_best->bits.str()}, {"cost", r.feasible_best->cost}};
  else
    j["feasible_best"] = nullptr;
}

}  // namespace qfolio
