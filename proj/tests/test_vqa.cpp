#include "doctest.h"

#include <numbers>

#include "qfolio/error.hpp"
#include "qfolio/optimizers.hpp"
#include "qfolio/oracle.hpp"
#include "qfolio/vqa.hpp"
#include "support.hpp"

using namespace qfolio;

namespace {

// H = Z_0 as a one-variable QUBO: x = (1 - z)/2, so z = 1 - 2x and Q = [[-2]], offset 1.
struct SingleZ {
  QuboProblem problem;
  IsingHamiltonian ham;
  ParameterizedCircuit circuit;

  SingleZ() {
    problem.n = 1;
    problem.Q = Matrix(1);
    problem.Q(0, 0) = -2.0;
    problem.offset = 1.0;
    ham = to_ising(problem);
    circuit.n = 1;
    circuit.depth = 1;
    circuit.family = AnsatzFamily::RealAmplitudes;
    circuit.gates = {Gate::rx(0, 0)};
    circuit.param_count = 1;
  }
};

OptimizerConfig exact_config(std::uint64_t seed, std::size_t budget = 500) {
  OptimizerConfig c;
  c.seed = seed;
  c.max_evaluations = budget;
  return c;
}

}  // namespace

TEST_CASE("nelder-mead minimises a quadratic and respects the budget") {
  std::size_t calls = 0;
  const Objective f = [&](std::span<const double> x) {
    ++calls;
    return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0) + 0.5 * x[0] * x[1];
  };
  const auto out = nelder_mead(f, {3.0, 3.0}, NelderMeadOptions{.max_evaluations = 2000});
  CHECK(out.termination == Termination::Converged);
  CHECK(out.evaluations == calls);
  // stationary point of the quadratic
  CHECK(out.x[1] == doctest::Approx(-16.5 / 7.875).epsilon(1e-4));
  CHECK(out.x[0] == doctest::Approx(1.0 + 16.5 / (4.0 * 7.875)).epsilon(1e-4));

  calls = 0;
  const auto capped = nelder_mead(f, {3.0, 3.0}, NelderMeadOptions{.max_evaluations = 17});
  CHECK(calls == 17);
  CHECK(capped.evaluations == 17);
  CHECK(capped.termination == Termination::BudgetExhausted);
}

TEST_CASE("spsa makes progress within its evaluation schedule") {
  std::size_t calls = 0;
  const Objective f = [&](std::span<const double> x) {
    ++calls;
    double s = 0;
    for (double v : x) s += (v - 0.5) * (v - 0.5);
    return s;
  };
  const std::vector<double> x0(6, 3.0);
  const auto out = spsa(f, x0, SpsaOptions{.max_evaluations = 401, .seed = 3});
  CHECK(calls == 401);
  CHECK(out.termination == Termination::ScheduleExhausted);
  CHECK(out.value < 0.1 * f(x0));
  const auto again = spsa(f, x0, SpsaOptions{.max_evaluations = 401, .seed = 3});
  CHECK(again.x == out.x);
}

TEST_CASE("evaluate_cost examples") {
  Xoshiro256 rng(1);
  const auto problem = qtest::random_qubo(rng, 4);
  const auto ham = to_ising(problem);
  const auto table = ham.energy_table();
  double mean = 0;
  for (double e : table) mean += e / double(table.size());

  const auto qaoa = build_qaoa(4, 3, ham);
  const std::vector<double> zq(6, 0.0);
  CHECK(std::abs(evaluate_cost(qaoa, zq, ham, problem, CostMode::Exact, 1, 0) - mean) < 1e-12);

  const auto ra = build_real_amplitudes(4, 2);
  const std::vector<double> zr(12, 0.0);
  CHECK(std::abs(evaluate_cost(ra, zr, ham, problem, CostMode::Exact, 1, 0) - ham.energy(0)) < 1e-12);
  CHECK(evaluate_cost(ra, zr, ham, problem, CostMode::Sampled, 64, 9) == 0.0);

  const std::vector<double> wrong(3, 0.0);
  CHECK_THROWS_AS(evaluate_cost(ra, wrong, ham, problem, CostMode::Exact, 1, 0), Error);
}

TEST_CASE("sampled and exact cost agree statistically") {
  Xoshiro256 rng(2);
  const auto problem = qtest::random_qubo(rng, 4);
  const auto ham = to_ising(problem);
  const auto c = build_efficient_su2(4, 2);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> theta(c.param_count);
    for (auto& t : theta) t = qtest::uniform(rng, 0, 6.3);
    const double exact = evaluate_cost(c, theta, ham, problem, CostMode::Exact, 1, 0);
    const double sampled = evaluate_cost(c, theta, ham, problem, CostMode::Sampled, 1 << 16, 77 + trial);
    const auto probs = c.prepare(theta).probabilities();
    double m2 = 0;
    const auto table = ham.energy_table();
    for (std::size_t z = 0; z < probs.size(); ++z) m2 += probs[z] * table[z] * table[z];
    const double se = std::sqrt(std::max(0.0, m2 - exact * exact) / double(1 << 16));
    CHECK(std::abs(sampled - exact) <= 4 * se + 1e-12);
  }
}

TEST_CASE("minimize finds the minimum of cos theta") {
  const SingleZ z;
  const auto trace = minimize(z.circuit, z.ham, z.problem, exact_config(4));
  // <Z> = cos(theta); raw cost = <Z> - 1 because the offset is dropped
  CHECK(trace.best_cost + z.problem.offset == doctest::Approx(-1.0).epsilon(1e-3));
  const double theta = std::fmod(std::abs(trace.best_theta[0]), 2 * std::numbers::pi);
  CHECK(theta == doctest::Approx(std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("trace invariants") {
  Xoshiro256 rng(5);
  const auto problem = qtest::random_qubo(rng, 4);
  const auto ham = to_ising(problem);
  for (auto f : kAllFamilies) {
    const auto c = build_ansatz(f, 4, 2, ham, 1);
    for (auto method : {OptimizerMethod::NelderMead, OptimizerMethod::Spsa}) {
      auto cfg = exact_config(6, 120);
      cfg.method = method;
      const auto trace = minimize(c, ham, problem, cfg);
      REQUIRE(trace.evaluations.size() <= 120);
      REQUIRE(trace.deltas.size() + 1 == trace.evaluations.size());
      double best = trace.evaluations[0].cost;
      for (std::size_t t = 0; t < trace.evaluations.size(); ++t) {
        CHECK(trace.evaluations[t].t == t);
        CHECK(trace.evaluations[t].theta.size() == c.param_count);
        if (t > 0) CHECK(trace.deltas[t - 1] == trace.evaluations[t].cost - trace.evaluations[t - 1].cost);
        best = std::min(best, trace.evaluations[t].cost);
      }
      CHECK(trace.best_cost == best);
      const auto running = trace.running_best();
      for (std::size_t t = 1; t < running.size(); ++t) CHECK(running[t] <= running[t - 1]);
      CHECK(running.back() == best);
      CHECK(trace.final_histogram.shots == cfg.shots);

      // the first theta is drawn from [0, 2 pi)
      for (double v : trace.evaluations[0].theta) CHECK((v >= 0.0 && v < 2 * std::numbers::pi));
    }
  }
}

TEST_CASE("budget of one evaluation") {
  const SingleZ z;
  const auto trace = minimize(z.circuit, z.ham, z.problem, exact_config(1, 1));
  CHECK(trace.evaluations.size() == 1);
  CHECK(trace.deltas.empty());
  CHECK(trace.best_cost == trace.evaluations[0].cost);
}

TEST_CASE("minimize is deterministic") {
  Xoshiro256 rng(7);
  const auto problem = qtest::random_qubo(rng, 5);
  const auto ham = to_ising(problem);
  const auto c = build_two_local(5, 2);
  CHECK(minimize(c, ham, problem, exact_config(3, 200)) == minimize(c, ham, problem, exact_config(3, 200)));
  CHECK_FALSE(minimize(c, ham, problem, exact_config(3, 200)) == minimize(c, ham, problem, exact_config(4, 200)));

  auto sampled = exact_config(3, 100);
  sampled.cost_mode = CostMode::Sampled;
  sampled.shots = 256;
  CHECK(minimize(c, ham, problem, sampled) == minimize(c, ham, problem, sampled));
}

TEST_CASE("config validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_evaluations = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.shots = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.initial_spread = -1;
  CHECK_THROWS_AS(c.validate(), Error);

  OptimizerConfig d;
  d.method = OptimizerMethod::Spsa;
  d.cost_mode = CostMode::Sampled;
  d.shots = 77;
  d.seed = 12;
  const nlohmann::json j = d;
  CHECK(j.get<OptimizerConfig>() == d);
  CHECK(parse_cost_mode("EXACT_EXPECTATION") == CostMode::Exact);
  CHECK(parse_method("NELDER_MEAD") == OptimizerMethod::NelderMead);
}

TEST_CASE("experiment grid") {
  Xoshiro256 rng(9);
  auto problem = qtest::random_qubo(rng, 4);
  const auto ham = to_ising(problem);
  const auto oracle = solve_exact(problem);

  const std::vector<AnsatzFamily> one_family{AnsatzFamily::QAOA};
  const std::vector<std::size_t> one_depth{2};
  const std::vector<std::uint64_t> one_seed{0};
  CHECK(run_experiment_grid(problem, one_family, one_depth, one_seed, exact_config(0, 50)).size() == 1);

  const std::vector<AnsatzFamily> families(std::begin(kAllFamilies), std::end(kAllFamilies));
  const std::vector<std::size_t> depths{1, 2};
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  GridOptions serial, parallel;
  parallel.jobs = 4;
  const auto a = run_experiment_grid(problem, families, depths, seeds, exact_config(0, 150), serial);
  const auto b = run_experiment_grid(problem, families, depths, seeds, exact_config(0, 150), parallel);
  REQUIRE(a.size() == 30);
  REQUIRE(b.size() == 30);

  std::size_t i = 0;
  for (auto f : families)
    for (auto d : depths)
      for (auto s : seeds) {
        const auto& r = a[i];
        CHECK(r.metadata.family == f);
        CHECK(r.metadata.depth == d);
        CHECK(r.metadata.seed == s);
        CHECK(to_json(r) == to_json(b[i]));
        REQUIRE(r.ground_truth);
        CHECK(r.ground_truth->bits == oracle.best_bitstring);

        // lower bound from the oracle
        CHECK(r.best_sampled(problem).cost >= oracle.best_cost - 1e-12);
        double psum = 0;
        for (std::size_t k = 0; k < r.top_bitstrings.size(); ++k) {
          psum += r.top_bitstrings[k].probability;
          if (k > 0) CHECK(r.top_bitstrings[k].probability <= r.top_bitstrings[k - 1].probability);
          CHECK(r.top_bitstrings[k].cost ==
                doctest::Approx(qubo_cost(problem, r.top_bitstrings[k].bits) + problem.offset));
        }
        CHECK(psum <= 1.0 + 1e-9);
        ++i;
      }

  // seeds never change the problem
  CHECK(to_ising(problem).h == ham.h);

  const std::vector<std::uint64_t> no_seeds;
  CHECK_THROWS_AS(run_experiment_grid(problem, families, depths, no_seeds, exact_config(0)), Error);
}

TEST_CASE("run result JSON round trip") {
  Xoshiro256 rng(10);
  const auto problem = qtest::random_qubo(rng, 3);
  const auto ham = to_ising(problem);
  const auto oracle = solve_exact(problem);
  const auto r = run_single(problem, ham, AnsatzFamily::EfficientSU2, 2, exact_config(5, 60), &oracle);
  const auto j = to_json(r, true);
  const auto back = run_result_from_json(j);
  CHECK(back.trace == r.trace);
  CHECK(to_json(back, true) == j);
  CHECK(back.ground_truth == r.ground_truth);

  const auto slim = run_result_from_json(to_json(r));
  CHECK(slim.trace.evaluations.size() == r.trace.evaluations.size());
  CHECK(slim.trace.evaluations[0].theta.empty());
  CHECK(slim.trace.best_theta == r.trace.best_theta);
}
