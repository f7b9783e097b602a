#include "qfolio/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qfolio/error.hpp"
#include "qfolio/rng.hpp"

namespace qfolio {

std::string_view to_string(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::CX: return "CX";
    case GateKind::CZ: return "CZ";
    case GateKind::DiagonalPhase: return "DIAGONAL_PHASE";
  }
  return "?";
}

Gate Gate::rotation(GateKind kind, std::size_t q, int slot, double scale) {
  Gate g;
  g.kind = kind;
  g.qubits = {q, q};
  g.slot = slot;
  g.scale = scale;
  return g;
}

Gate Gate::fixed(GateKind kind, std::size_t q, double angle) {
  Gate g = rotation(kind, q, -1, 1.0);
  g.angle = angle;
  return g;
}

Gate Gate::h(std::size_t q) {
  Gate g;
  g.kind = GateKind::H;
  g.qubits = {q, q};
  return g;
}

Gate Gate::cx(std::size_t control, std::size_t target) {
  Gate g;
  g.kind = GateKind::CX;
  g.qubits = {control, target};
  return g;
}

Gate Gate::cz(std::size_t a, std::size_t b) {
  Gate g;
  g.kind = GateKind::CZ;
  g.qubits = {a, b};
  return g;
}

Gate Gate::diagonal_phase(std::shared_ptr<const std::vector<double>> table, int slot, double scale) {
  Gate g;
  g.kind = GateKind::DiagonalPhase;
  g.diagonal = std::move(table);
  g.slot = slot;
  g.scale = scale;
  return g;
}

double Gate::bound_angle(std::span<const double> params) const {
  if (slot < 0) return angle;
  if (static_cast<std::size_t>(slot) >= params.size())
    throw Error(ErrorCode::UnboundParameter, "slot " + std::to_string(slot) + " has no bound value");
  return scale * params[static_cast<std::size_t>(slot)];
}

StateVector::StateVector(std::size_t n) : n_(n), kernels_(&kernels::active()) {
  if (n < 1 || n > kMaxQubits)
    throw Error(ErrorCode::TooManyQubits, "qubit count " + std::to_string(n) + " outside [1, 20]");
  amps_.assign(std::size_t{1} << n, cplx{});
}

StateVector StateVector::zero(std::size_t n) {
  StateVector s(n);
  s.reset_zero();
  return s;
}

StateVector StateVector::uniform(std::size_t n) {
  StateVector s(n);
  s.reset_uniform();
  return s;
}

void StateVector::reset_zero() {
  std::fill(amps_.begin(), amps_.end(), cplx{});
  amps_[0] = 1.0;
}

void StateVector::reset_uniform() {
  const double a = std::pow(2.0, -0.5 * static_cast<double>(n_));
  std::fill(amps_.begin(), amps_.end(), cplx{a, 0.0});
}

double StateVector::norm_sq() const { return kernels_->norm_sq(amps_.data(), amps_.size()); }

std::vector<double> StateVector::probabilities() const {
  std::vector<double> out(amps_.size());
  kernels_->probabilities(amps_.data(), out.data(), amps_.size());
  return out;
}

void StateVector::apply(const Gate& gate, std::span<const double> params) {
  const auto check = [&](std::size_t q) {
    if (q >= n_) throw Error(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(q) + " >= " + std::to_string(n_));
  };

  const std::size_t dim = amps_.size();
  switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::H: {
      check(gate.qubits[0]);
      kernels::Mat2 m;
      if (gate.kind == GateKind::H) {
        const double r = std::numbers::sqrt2 / 2.0;
        m = {r, r, r, -r};
      } else {
        const double theta = gate.bound_angle(params);
        const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
        if (gate.kind == GateKind::RX)
          m = {c, cplx{0, -s}, cplx{0, -s}, c};
        else if (gate.kind == GateKind::RY)
          m = {c, -s, s, c};
        else
          m = {cplx{c, -s}, 0.0, 0.0, cplx{c, s}};
      }
      kernels_->apply_1q(amps_.data(), dim, static_cast<unsigned>(gate.qubits[0]), m);
      return;
    }
    case GateKind::CX:
    case GateKind::CZ: {
      check(gate.qubits[0]);
      check(gate.qubits[1]);
      if (gate.qubits[0] == gate.qubits[1])
        throw Error(ErrorCode::IndexOutOfRange, "two-qubit gate on a single qubit");
      const auto a = static_cast<unsigned>(gate.qubits[0]);
      const auto b = static_cast<unsigned>(gate.qubits[1]);
      if (gate.kind == GateKind::CX)
        kernels_->apply_cx(amps_.data(), dim, a, b);
      else
        kernels_->apply_cz(amps_.data(), dim, a, b);
      return;
    }
    case GateKind::DiagonalPhase: {
      if (!gate.diagonal || gate.diagonal->size() != dim)
        throw Error(ErrorCode::DimensionMismatch, "diagonal table does not match state dimension");
      const double gamma = gate.bound_angle(params);
      scratch_.resize(dim);
      const auto& table = *gate.diagonal;
      for (std::size_t z = 0; z < dim; ++z) {
        const double phi = gamma * table[z];
        scratch_[z] = cplx{std::cos(phi), -std::sin(phi)};
      }
      kernels_->apply_diagonal(amps_.data(), scratch_.data(), dim);
      return;
    }
  }
}

double expectation_diagonal(const StateVector& state, std::span<const double> table) {
  if (table.size() != state.dim()) throw Error(ErrorCode::DimensionMismatch, "value table size != 2^n");
  return state.kernel_table().expectation(state.amplitudes().data(), table.data(), state.dim());
}

double expectation_diagonal(const StateVector& state, const IsingHamiltonian& ham) {
  if (ham.n != state.qubits()) throw Error(ErrorCode::DimensionMismatch, "hamiltonian and state disagree on n");
  const auto table = ham.energy_table();
  return expectation_diagonal(state, table);
}

double SampleHistogram::probability(std::uint64_t bits) const {
  auto it = counts.find(bits);
  return it == counts.end() || shots == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(shots);
}

SampleHistogram sample_probabilities(std::span<const double> probs, std::size_t n, std::uint64_t shots,
                                     std::uint64_t seed) {
  if (shots == 0) throw Error(ErrorCode::ZeroShots, "shots must be >= 1");
  if (probs.size() != (std::size_t{1} << n)) throw Error(ErrorCode::DimensionMismatch, "probability vector size != 2^n");

  std::vector<double> cdf(probs.size());
  double running = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    running += probs[i];
    cdf[i] = running;
    if (probs[i] > 0.0) last_nonzero = i;
  }
  const double total = running;

  SampleHistogram hist;
  hist.n = n;
  hist.shots = shots;
  hist.seed = seed;
  Xoshiro256 rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * total;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    idx = std::min(idx, last_nonzero);
    ++hist.counts[idx];
  }
  return hist;
}

SampleHistogram sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw Error(ErrorCode::ZeroShots, "shots must be >= 1");
  return sample_probabilities(state.probabilities(), state.qubits(), shots, seed);
}

double sampled_cost(const SampleHistogram& hist, const QuboProblem& problem) {
  if (hist.n != problem.n) throw Error(ErrorCode::LengthMismatch, "histogram keys have length != n");
  if (hist.shots == 0) throw Error(ErrorCode::ZeroShots, "empty histogram");
  double acc = 0.0;
  for (const auto& [bits, count] : hist.counts)
    acc += static_cast<double>(count) * qubo_cost(problem, Bitstring(hist.n, bits));
  return acc / static_cast<double>(hist.shots);
}

void to_json(nlohmann::json& j, const SampleHistogram& h) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [bits, count] : h.counts) counts[Bitstring(h.n, bits).str()] = count;
  j = nlohmann::json{{"counts", counts}, {"shots", h.shots}, {"seed", h.seed}};
}

void from_json(const nlohmann::json& j, SampleHistogram& h) {
  h = SampleHistogram{};
  h.shots = j.at("shots").get<std::uint64_t>();
  h.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [key, value] : j.at("counts").items()) {
    const auto b = Bitstring::parse(key);
    if (h.n == 0) h.n = b.size();
    if (b.size() != h.n) throw Error(ErrorCode::LengthMismatch, "histogram keys of mixed length");
    h.counts[b.bits()] = value.get<std::uint64_t>();
  }
}

}  // namespace qfolio
