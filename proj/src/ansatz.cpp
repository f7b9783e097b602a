#include "qfolio/ansatz.hpp"

#include <numbers>

#include "qfolio/error.hpp"
#include "qfolio/rng.hpp"

namespace qfolio {

std::string_view to_string(AnsatzFamily family) noexcept {
  switch (family) {
    case AnsatzFamily::QAOA: return "QAOA";
    case AnsatzFamily::TwoLocal: return "TWO_LOCAL";
    case AnsatzFamily::EfficientSU2: return "EFFICIENT_SU2";
    case AnsatzFamily::PauliTwoDesign: return "PAULI_TWO_DESIGN";
    case AnsatzFamily::RealAmplitudes: return "REAL_AMPLITUDES";
  }
  return "?";
}

std::optional<AnsatzFamily> parse_family(std::string_view text) {
  for (auto f : kAllFamilies)
    if (to_string(f) == text) return f;
  return std::nullopt;
}

void ParameterizedCircuit::prepare(StateVector& state, std::span<const double> theta) const {
  if (theta.size() != param_count)
    throw Error(ErrorCode::ParamLengthMismatch,
                "expected " + std::to_string(param_count) + " parameters, got " + std::to_string(theta.size()));
  if (state.qubits() != n) throw Error(ErrorCode::DimensionMismatch, "state qubit count != circuit width");
  if (initial_state == InitialState::Uniform)
    state.reset_uniform();
  else
    state.reset_zero();
  for (const auto& g : gates) state.apply(g, theta);
}

StateVector ParameterizedCircuit::prepare(std::span<const double> theta) const {
  auto state = StateVector::zero(n);
  prepare(state, theta);
  return state;
}

std::map<std::string, std::size_t> ParameterizedCircuit::gate_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& g : gates) ++out[std::string(to_string(g.kind))];
  return out;
}

namespace {

void check_shape(std::size_t n, std::size_t p) {
  if (n < 1 || n > kMaxQubits) throw Error(ErrorCode::TooManyQubits, "circuit width out of range");
  if (p < 1) throw Error(ErrorCode::InvalidConfig, "depth must be >= 1");
}

ParameterizedCircuit empty(AnsatzFamily family, std::size_t n, std::size_t p) {
  ParameterizedCircuit c;
  c.n = n;
  c.depth = p;
  c.family = family;
  c.initial_state = family == AnsatzFamily::QAOA ? InitialState::Uniform : InitialState::Zero;
  return c;
}

void all_pairs(ParameterizedCircuit& c, GateKind kind) {
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = i + 1; j < c.n; ++j)
      c.gates.push_back(kind == GateKind::CZ ? Gate::cz(i, j) : Gate::cx(i, j));
}

// Appends one rotation per (axis, qubit), axis-major, each with a fresh slot.
void rotation_block(ParameterizedCircuit& c, std::initializer_list<GateKind> axes) {
  for (auto axis : axes) {
    for (std::size_t q = 0; q < c.n; ++q) {
      const int slot = static_cast<int>(c.param_count++);
      switch (axis) {
        case GateKind::RX: c.gates.push_back(Gate::rx(q, slot)); break;
        case GateKind::RY: c.gates.push_back(Gate::ry(q, slot)); break;
        default: c.gates.push_back(Gate::rz(q, slot)); break;
      }
    }
  }
}

ParameterizedCircuit layered(AnsatzFamily family, std::size_t n, std::size_t p,
                             std::initializer_list<GateKind> axes, GateKind entangler) {
  check_shape(n, p);
  auto c = empty(family, n, p);
  for (std::size_t rep = 0; rep < p; ++rep) {
    rotation_block(c, axes);
    all_pairs(c, entangler);
  }
  rotation_block(c, axes);
  return c;
}

}  // namespace

ParameterizedCircuit build_qaoa(std::size_t n, std::size_t p, const IsingHamiltonian& ham) {
  check_shape(n, p);
  if (ham.n != n) throw Error(ErrorCode::DimensionMismatch, "hamiltonian width != n");
  auto c = empty(AnsatzFamily::QAOA, n, p);
  auto table = std::make_shared<const std::vector<double>>(ham.energy_table());
  for (std::size_t layer = 0; layer < p; ++layer) {
    const int gamma = static_cast<int>(2 * layer);
    const int beta = gamma + 1;
    c.gates.push_back(Gate::diagonal_phase(table, gamma));
    // exp(-i beta X) = RX(2 beta)
    for (std::size_t q = 0; q < n; ++q) c.gates.push_back(Gate::rx(q, beta, 2.0));
  }
  c.param_count = 2 * p;
  return c;
}

ParameterizedCircuit build_two_local(std::size_t n, std::size_t p) {
  return layered(AnsatzFamily::TwoLocal, n, p, {GateKind::RX, GateKind::RY}, GateKind::CZ);
}

ParameterizedCircuit build_efficient_su2(std::size_t n, std::size_t p) {
  return layered(AnsatzFamily::EfficientSU2, n, p, {GateKind::RY, GateKind::RZ}, GateKind::CX);
}

ParameterizedCircuit build_real_amplitudes(std::size_t n, std::size_t p) {
  return layered(AnsatzFamily::RealAmplitudes, n, p, {GateKind::RY}, GateKind::CX);
}

ParameterizedCircuit build_pauli_two_design(std::size_t n, std::size_t p, std::uint64_t seed) {
  check_shape(n, p);
  auto c = empty(AnsatzFamily::PauliTwoDesign, n, p);
  Xoshiro256 rng(seed);

  const auto random_layer = [&] {
    for (std::size_t q = 0; q < n; ++q) {
      const int slot = static_cast<int>(c.param_count++);
      switch (rng.below(3)) {
        case 0: c.gates.push_back(Gate::rx(q, slot)); break;
        case 1: c.gates.push_back(Gate::ry(q, slot)); break;
        default: c.gates.push_back(Gate::rz(q, slot)); break;
      }
    }
  };

  for (std::size_t q = 0; q < n; ++q) c.gates.push_back(Gate::fixed(GateKind::RY, q, std::numbers::pi / 4.0));
  for (std::size_t rep = 0; rep < p; ++rep) {
    random_layer();
    // even layers pair (0,1),(2,3)...; odd layers (1,2),(3,4)...
    for (std::size_t q = rep % 2; q + 1 < n; q += 2) c.gates.push_back(Gate::cz(q, q + 1));
  }
  random_layer();
  return c;
}

ParameterizedCircuit build_ansatz(AnsatzFamily family, std::size_t n, std::size_t p, const IsingHamiltonian& ham,
                                  std::uint64_t seed) {
  switch (family) {
    case AnsatzFamily::QAOA: return build_qaoa(n, p, ham);
    case AnsatzFamily::TwoLocal: return build_two_local(n, p);
    case AnsatzFamily::EfficientSU2: return build_efficient_su2(n, p);
    case AnsatzFamily::PauliTwoDesign: return build_pauli_two_design(n, p, seed);
    case AnsatzFamily::RealAmplitudes: return build_real_amplitudes(n, p);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown ansatz family");
}

nlohmann::json circuit_summary(const ParameterizedCircuit& circuit) {
  return nlohmann::json{{"family", to_string(circuit.family)},
                        {"n", circuit.n},
                        {"depth", circuit.depth},
                        {"param_count", circuit.param_count},
                        {"initial_state", circuit.initial_state == InitialState::Uniform ? "UNIFORM" : "ZERO"},
                        {"gate_counts", circuit.gate_counts()}};
}

}  // namespace qfolio
