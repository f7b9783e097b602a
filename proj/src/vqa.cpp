#include "qfolio/vqa.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "qfolio/error.hpp"
#include "qfolio/rng.hpp"

namespace qfolio {

std::string_view to_string(OptimizerMethod m) noexcept {
  return m == OptimizerMethod::NelderMead ? "NELDER_MEAD" : "SPSA";
}

std::string_view to_string(CostMode m) noexcept { return m == CostMode::Exact ? "exact" : "sampled"; }

std::optional<OptimizerMethod> parse_method(std::string_view text) {
  if (text == "NELDER_MEAD" || text == "nelder-mead") return OptimizerMethod::NelderMead;
  if (text == "SPSA" || text == "spsa") return OptimizerMethod::Spsa;
  return std::nullopt;
}

std::optional<CostMode> parse_cost_mode(std::string_view text) {
  if (text == "exact" || text == "EXACT_EXPECTATION") return CostMode::Exact;
  if (text == "sampled" || text == "SAMPLED") return CostMode::Sampled;
  return std::nullopt;
}

void OptimizerConfig::validate() const {
  if (max_evaluations < 1) throw Error(ErrorCode::InvalidConfig, "max_evaluations must be >= 1");
  if (shots < 1) throw Error(ErrorCode::InvalidConfig, "shots must be >= 1");
  if (!(initial_spread >= 0.0)) throw Error(ErrorCode::InvalidConfig, "initial_spread must be >= 0");
}

void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = nlohmann::json{{"method", to_string(c.method)},         {"max_evaluations", c.max_evaluations},
                     {"initial_spread", c.initial_spread},     {"seed", c.seed},
                     {"cost_mode", to_string(c.cost_mode)},    {"shots", c.shots}};
}

void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  c = OptimizerConfig{};
  if (j.contains("method")) {
    auto m = parse_method(j.at("method").get<std::string>());
    if (!m) throw Error(ErrorCode::InvalidConfig, "unknown optimizer method");
    c.method = *m;
  }
  if (j.contains("cost_mode")) {
    auto m = parse_cost_mode(j.at("cost_mode").get<std::string>());
    if (!m) throw Error(ErrorCode::InvalidConfig, "unknown cost mode");
    c.cost_mode = *m;
  }
  c.max_evaluations = j.value("max_evaluations", c.max_evaluations);
  c.initial_spread = j.value("initial_spread", c.initial_spread);
  c.seed = j.value("seed", c.seed);
  c.shots = j.value("shots", c.shots);
}

CostEvaluator::CostEvaluator(const ParameterizedCircuit& circuit, const IsingHamiltonian& ham,
                             const QuboProblem& problem, CostMode mode, std::uint64_t shots)
    : circuit_(circuit), mode_(mode), shots_(shots), state_(StateVector::zero(circuit.n)) {
  if (ham.n != circuit.n || problem.n != circuit.n)
    throw Error(ErrorCode::DimensionMismatch, "circuit, hamiltonian and problem widths differ");
  if (mode == CostMode::Sampled && shots == 0) throw Error(ErrorCode::ZeroShots, "sampled mode needs shots >= 1");
  energies_ = ham.energy_table();
  costs_.resize(energies_.size());
  for (std::uint64_t z = 0; z < costs_.size(); ++z) costs_[z] = qubo_cost(problem, Bitstring(problem.n, z));
}

double CostEvaluator::operator()(std::span<const double> theta, std::uint64_t sample_seed) {
  circuit_.prepare(state_, theta);
  if (mode_ == CostMode::Exact) return expectation_diagonal(state_, energies_);
  const auto hist = sample(state_, shots_, sample_seed);
  double acc = 0.0;
  for (const auto& [bits, count] : hist.counts) acc += static_cast<double>(count) * costs_[bits];
  return acc / static_cast<double>(hist.shots);
}

SampleHistogram CostEvaluator::histogram(std::span<const double> theta, std::uint64_t shots, std::uint64_t seed) {
  circuit_.prepare(state_, theta);
  return sample(state_, shots, seed);
}

double evaluate_cost(const ParameterizedCircuit& circuit, std::span<const double> theta, const IsingHamiltonian& ham,
                     const QuboProblem& problem, CostMode mode, std::uint64_t shots, std::uint64_t seed) {
  if (theta.size() != circuit.param_count)
    throw Error(ErrorCode::ParamLengthMismatch, "theta length != circuit parameter count");
  CostEvaluator eval(circuit, ham, problem, mode, shots);
  return eval(theta, seed);
}

std::vector<double> OptimizationTrace::running_best() const {
  std::vector<double> out;
  out.reserve(evaluations.size());
  for (const auto& e : evaluations) out.push_back(out.empty() ? e.cost : std::min(out.back(), e.cost));
  return out;
}

OptimizationTrace minimize(const ParameterizedCircuit& circuit, const IsingHamiltonian& ham,
                           const QuboProblem& problem, const OptimizerConfig& config) {
  config.validate();
  CostEvaluator evaluator(circuit, ham, problem, config.cost_mode, config.shots);

  std::vector<double> theta0(circuit.param_count);
  Xoshiro256 init_rng(derive_seed(config.seed, seed_stream::kInitialTheta));
  for (auto& v : theta0) v = init_rng.uniform() * config.initial_spread;

  OptimizationTrace trace;
  const Objective objective = [&](std::span<const double> theta) {
    const std::size_t t = trace.evaluations.size();
    const double cost = evaluator(theta, derive_seed(config.seed, seed_stream::kEvaluationBase + t));
    trace.evaluations.push_back({t, std::vector<double>(theta.begin(), theta.end()), cost});
    return cost;
  };

  OptimizerOutcome outcome;
  if (config.method == OptimizerMethod::NelderMead) {
    outcome = nelder_mead(objective, theta0, NelderMeadOptions{.max_evaluations = config.max_evaluations});
  } else {
    outcome = spsa(objective, theta0,
                   SpsaOptions{.max_evaluations = config.max_evaluations,
                               .seed = derive_seed(config.seed, seed_stream::kOptimizer)});
  }

  for (std::size_t t = 1; t < trace.evaluations.size(); ++t)
    trace.deltas.push_back(trace.evaluations[t].cost - trace.evaluations[t - 1].cost);

  // First evaluation attaining the minimum.
  const auto best = std::min_element(trace.evaluations.begin(), trace.evaluations.end(),
                                     [](const Evaluation& a, const Evaluation& b) { return a.cost < b.cost; });
  trace.best_theta = best->theta;
  trace.best_cost = best->cost;
  trace.termination = outcome.termination;
  trace.final_histogram =
      evaluator.histogram(trace.best_theta, config.shots, derive_seed(config.seed, seed_stream::kFinalHistogram));
  return trace;
}

ScoredOutcome RunResult::best_sampled(const QuboProblem& problem) const {
  ScoredOutcome best;
  bool first = true;
  for (const auto& [bits, count] : trace.final_histogram.counts) {
    const Bitstring b(problem.n, bits);
    const double c = qubo_cost(problem, b) + problem.offset;
    if (first || c < best.cost) {
      best = {b, trace.final_histogram.probability(bits), c};
      first = false;
    }
  }
  return best;
}

const ScoredOutcome& RunResult::top() const {
  if (top_bitstrings.empty()) throw Error(ErrorCode::DimensionMismatch, "run has no sampled bitstrings");
  return top_bitstrings.front();
}

RunResult run_single(const QuboProblem& problem, const IsingHamiltonian& ham, AnsatzFamily family,
                     std::size_t depth, const OptimizerConfig& config, const OracleResult* oracle,
                     std::size_t top_k) {
  const auto circuit = build_ansatz(family, problem.n, depth, ham, config.seed);

  RunResult r;
  r.metadata = {family, problem.n, depth, config.seed, config};
  r.circuit = circuit_summary(circuit);
  r.trace = minimize(circuit, ham, problem, config);

  const auto& hist = r.trace.final_histogram;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranked(hist.counts.begin(), hist.counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_k) ranked.resize(top_k);
  for (const auto& [bits, count] : ranked) {
    const Bitstring b(problem.n, bits);
    r.top_bitstrings.push_back({b, hist.probability(bits), qubo_cost(problem, b) + problem.offset});
  }
  if (oracle) r.ground_truth = ScoredSelection{oracle->best_bitstring, oracle->best_cost};
  return r;
}

std::vector<RunResult> run_experiment_grid(const QuboProblem& problem, std::span<const AnsatzFamily> families,
                                           std::span<const std::size_t> depths,
                                           std::span<const std::uint64_t> seeds,
                                           const OptimizerConfig& config_template, const GridOptions& options) {
  if (families.empty() || depths.empty() || seeds.empty())
    throw Error(ErrorCode::InvalidConfig, "families, depths and seeds must be non-empty");
  config_template.validate();

  const auto ham = to_ising(problem);
  std::optional<OracleResult> oracle;
  if (options.include_ground_truth && problem.n <= kGroundTruthMaxQubits) oracle = solve_exact(problem);

  struct Task {
    AnsatzFamily family;
    std::size_t depth;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (auto f : families)
    for (auto d : depths)
      for (auto s : seeds) tasks.push_back({f, d, s});

  std::vector<RunResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        auto config = config_template;
        config.seed = tasks[i].seed;
        results[i] = run_single(problem, ham, tasks[i].family, tasks[i].depth, config,
                                oracle ? &*oracle : nullptr, options.top_k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
        return;
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, tasks.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

namespace {

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::BudgetExhausted: return "budget_exhausted";
    case Termination::ScheduleExhausted: return "schedule_exhausted";
  }
  return "?";
}

Termination parse_termination(std::string_view s) {
  if (s == "converged") return Termination::Converged;
  if (s == "schedule_exhausted") return Termination::ScheduleExhausted;
  if (s == "budget_exhausted") return Termination::BudgetExhausted;
  throw Error(ErrorCode::InvalidConfig, "unknown termination " + std::string(s));
}

}  // namespace

nlohmann::json to_json(const RunResult& r, bool with_thetas) {
  nlohmann::json evaluations = nlohmann::json::array();
  for (const auto& e : r.trace.evaluations) {
    nlohmann::json row{{"t", e.t}, {"cost", e.cost}};
    if (with_thetas) row["theta"] = e.theta;
    evaluations.push_back(std::move(row));
  }
  nlohmann::json top = nlohmann::json::array();
  for (const auto& s : r.top_bitstrings)
    top.push_back({{"bitstring", s.bits.str()}, {"probability", s.probability}, {"cost", s.cost}});

  nlohmann::json j{
      {"metadata",
       {{"family", to_string(r.metadata.family)},
        {"n", r.metadata.n},
        {"depth", r.metadata.depth},
        {"seed", r.metadata.seed},
        {"config", r.metadata.config}}},
      {"circuit", r.circuit},
      {"trace",
       {{"evaluations", evaluations},
        {"deltas", r.trace.deltas},
        {"best", {{"theta", r.trace.best_theta}, {"cost", r.trace.best_cost}}},
        {"termination", termination_name(r.trace.termination)},
        {"final_histogram", r.trace.final_histogram}}},
      {"top_bitstrings", top},
  };
  if (r.ground_truth)
    j["ground_truth"] = {{"bitstring", r.ground_truth->bits.str()}, {"cost", r.ground_truth->cost}};
  else
    j["ground_truth"] = nullptr;
  return j;
}

RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult r;
  const auto& meta = j.at("metadata");
  const auto family = parse_family(meta.at("family").get<std::string>());
  if (!family) throw Error(ErrorCode::InvalidConfig, "unknown ansatz family in result");
  r.metadata = {*family, meta.at("n").get<std::size_t>(), meta.at("depth").get<std::size_t>(),
                meta.at("seed").get<std::uint64_t>(), meta.at("config").get<OptimizerConfig>()};
  r.circuit = j.at("circuit");

  const auto& trace = j.at("trace");
  for (const auto& e : trace.at("evaluations")) {
    Evaluation ev{e.at("t").get<std::size_t>(), {}, e.at("cost").get<double>()};
    if (e.contains("theta")) ev.theta = e.at("theta").get<std::vector<double>>();
    r.trace.evaluations.push_back(std::move(ev));
  }
  r.trace.deltas = trace.at("deltas").get<std::vector<double>>();
  r.trace.best_theta = trace.at("best").at("theta").get<std::vector<double>>();
  r.trace.best_cost = trace.at("best").at("cost").get<double>();
  r.trace.termination = parse_termination(trace.at("termination").get<std::string>());
  r.trace.final_histogram = trace.at("final_histogram").get<SampleHistogram>();

  for (const auto& s : j.at("top_bitstrings"))
    r.top_bitstrings.push_back({Bitstring::parse(s.at("bitstring").get<std::string>()),
                                s.at("probability").get<double>(), s.at("cost").get<double>()});
  if (const auto& gt = j.at("ground_truth"); !gt.is_null())
    r.ground_truth = ScoredSelection{Bitstring::parse(gt.at("bitstring").get<std::string>()),
                                     gt.at("cost").get<double>()};
  return r;
}

}  // namespace qfolio
