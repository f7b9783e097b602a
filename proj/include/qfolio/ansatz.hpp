#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qfolio/qubo.hpp"
#include "qfolio/statevector.hpp"

namespace qfolio {

enum class AnsatzFamily { QAOA, TwoLocal, EfficientSU2, PauliTwoDesign, RealAmplitudes };
enum class InitialState { Zero, Uniform };

inline constexpr AnsatzFamily kAllFamilies[] = {AnsatzFamily::QAOA, AnsatzFamily::TwoLocal,
                                                AnsatzFamily::EfficientSU2, AnsatzFamily::PauliTwoDesign,
                                                AnsatzFamily::RealAmplitudes};

/// "QAOA", "TWO_LOCAL", "EFFICIENT_SU2", "PAULI_TWO_DESIGN", "REAL_AMPLITUDES".
std::string_view to_string(AnsatzFamily family) noexcept;
std::optional<AnsatzFamily> parse_family(std::string_view text);

struct ParameterizedCircuit {
  std::size_t n = 0;
  std::size_t depth = 0;
  AnsatzFamily family = AnsatzFamily::QAOA;
  InitialState initial_state = InitialState::Zero;
  std::vector<Gate> gates;
  std::size_t param_count = 0;

  /// Resets `state` to the initial state and applies every gate bound to `theta`.
  /// Throws ParamLengthMismatch if |theta| != param_count.
  void prepare(StateVector& state, std::span<const double> theta) const;
  StateVector prepare(std::span<const double> theta) const;

  /// Count of gates per kind name.
  std::map<std::string, std::size_t> gate_counts() const;

  friend bool operator==(const ParameterizedCircuit&, const ParameterizedCircuit&) = default;
};

/// p alternating layers of exp(-i gamma_l H_C) and exp(-i beta_l sum X) on the
/// uniform superposition. Parameters are ordered [gamma_1, beta_1, ..., gamma_p, beta_p].
ParameterizedCircuit build_qaoa(std::size_t n, std::size_t p, const IsingHamiltonian& ham);

/// RX+RY rotation blocks with all-pairs CZ entanglement; 2n(p+1) parameters.
ParameterizedCircuit build_two_local(std::size_t n, std::size_t p);

/// RY+RZ rotation blocks with all-pairs CX entanglement; 2n(p+1) parameters.
ParameterizedCircuit build_efficient_su2(std::size_t n, std::size_t p);

/// RY rotation blocks with all-pairs CX entanglement; n(p+1) parameters.
ParameterizedCircuit build_real_amplitudes(std::size_t n, std::size_t p);

/// Fixed RY(pi/4) layer, then p repetitions of seeded random-axis rotations
/// and brickwork CZ; final rotation layer. n(p+1) parameters.
ParameterizedCircuit build_pauli_two_design(std::size_t n, std::size_t p, std::uint64_t seed);

/// Dispatches to the family builder. `ham` is used by QAOA only, `seed` by
/// PauliTwoDesign only.
ParameterizedCircuit build_ansatz(AnsatzFamily family, std::size_t n, std::size_t p, const IsingHamiltonian& ham,
                                  std::uint64_t seed);

/// {family, n, depth, param_count, gate_counts}
nlohmann::json circuit_summary(const ParameterizedCircuit& circuit);

}  // namespace qfolio
